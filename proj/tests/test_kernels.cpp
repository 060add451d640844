#include <gtest/gtest.h>

#include <vector>

#include "oracles.hpp"
#include "qsn/kernels.hpp"

using namespace qsn;

TEST(Kernels, ActiveTableIsOneOfTheVariants) {
  const auto& active = kernels::active();
  EXPECT_TRUE(&active == &kernels::scalar_table() || &active == kernels::avx2_table());
}

TEST(Kernels, ScalarReferenceValues) {
  const auto& k = kernels::scalar_table();
  const double a[] = {1, 2, 3};
  const double b[] = {4, -5, 6};
  EXPECT_EQ(k.dot(a, b, 3), 12.0);
  EXPECT_EQ(k.dot(a, b, 0), 0.0);
  // rows: (1, -2, 3) and (0, 4, -1); coeffs (2, 1) -> (2, 0, 5)
  const double rows[] = {1, -2, 3, 0, 4, -1};
  const double coeffs[] = {2, 1};
  EXPECT_EQ(k.combination_abs_max(coeffs, 2, rows, 3, 3), 5.0);
  EXPECT_EQ(k.combination_abs_max(coeffs, 2, rows, 3, 2), 2.0);
}

TEST(Kernels, Avx2CombinationMatchesScalarBitForBit) {
  const auto* avx = kernels::avx2_table();
  if (!avx) GTEST_SKIP() << "no AVX2 on this machine or build";
  const auto& ref = kernels::scalar_table();
  CounterRng rng(21);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + static_cast<std::size_t>(oracle::uniform_int(rng, 0, 7));
    const std::size_t cols = 1 + static_cast<std::size_t>(oracle::uniform_int(rng, 0, 40));
    const std::size_t stride = cols + static_cast<std::size_t>(oracle::uniform_int(rng, 0, 3));
    std::vector<double> rows(n * stride);
    std::vector<double> coeffs(n);
    for (double& x : rows) x = oracle::uniform(rng, -3.0, 3.0);
    for (double& x : coeffs) x = oracle::uniform(rng, -3.0, 3.0);
    EXPECT_EQ(avx->combination_abs_max(coeffs.data(), n, rows.data(), stride, cols),
              ref.combination_abs_max(coeffs.data(), n, rows.data(), stride, cols))
        << "n=" << n << " cols=" << cols;
  }
}

TEST(Kernels, Avx2DotMatchesScalarUpToSummationOrder) {
  const auto* avx = kernels::avx2_table();
  if (!avx) GTEST_SKIP() << "no AVX2 on this machine or build";
  const auto& ref = kernels::scalar_table();
  CounterRng rng(22);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t len = static_cast<std::size_t>(oracle::uniform_int(rng, 0, 70));
    std::vector<double> a(len), b(len);
    double scale = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
      a[i] = oracle::uniform(rng, -2.0, 2.0);
      b[i] = oracle::uniform(rng, -2.0, 2.0);
      scale += std::abs(a[i] * b[i]);
    }
    EXPECT_NEAR(avx->dot(a.data(), b.data(), len), ref.dot(a.data(), b.data(), len),
                4.0 * static_cast<double>(len) * 1.2e-16 * scale + 1e-300);
  }
}
