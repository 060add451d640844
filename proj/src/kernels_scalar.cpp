#include <cmath>

#include "qsn/kernels.hpp"

namespace qsn::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t len) {
  double s = 0.0;
  for (std::size_t j = 0; j < len; ++j) s += a[j] * b[j];
  return s;
}

double combination_abs_max_scalar(const double* coeffs, std::size_t nrows, const double* rows,
                                  std::size_t stride, std::size_t cols) {
  double best = 0.0;
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (std::size_t m = 0; m < nrows; ++m) s += coeffs[m] * rows[m * stride + j];
    best = std::fmax(best, std::fabs(s));
  }
  return best;
}

}  // namespace

namespace detail {
const KernelTable kScalar{"scalar", &dot_scalar, &combination_abs_max_scalar};
}

}  // namespace qsn::kernels
