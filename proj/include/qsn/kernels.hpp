#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference and, on x86-64,
// an AVX2 variant; active() picks one at first use based on CPUID. Setting
// QSN_KERNELS=scalar in the environment forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace qsn::kernels {

struct KernelTable {
  std::string_view name;

  /// sum_j a[j] * b[j]
  double (*dot)(const double* a, const double* b, std::size_t len);

  /// max_j | sum_m coeffs[m] * rows[m * stride + j] |  for j < cols.
  /// Accumulation over m runs in index order for every j, in every variant.
  double (*combination_abs_max)(const double* coeffs, std::size_t nrows, const double* rows,
                                std::size_t stride, std::size_t cols);
};

const KernelTable& scalar_table() noexcept;

/// nullptr when the build has no AVX2 variant or the CPU lacks AVX2.
const KernelTable* avx2_table() noexcept;

const KernelTable& active() noexcept;

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline double combination_abs_max(std::span<const double> coeffs, const double* rows,
                                  std::size_t stride, std::size_t cols) {
  return active().combination_abs_max(coeffs.data(), coeffs.size(), rows, stride, cols);
}

namespace detail {
extern const KernelTable kScalar;
#if defined(QSN_WITH_AVX2)
extern const KernelTable kAvx2;
#endif
}  // namespace detail

}  // namespace qsn::kernels
