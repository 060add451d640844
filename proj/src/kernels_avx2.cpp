#include <immintrin.h>

#include <cmath>

#include "qsn/kernels.hpp"

namespace qsn::kernels {
namespace {

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return std::fmax(_mm_cvtsd_f64(m), _mm_cvtsd_f64(_mm_unpackhi_pd(m, m)));
}

double dot_avx2(const double* a, const double* b, std::size_t len) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 8 <= len; j += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + j + 4), _mm256_loadu_pd(b + j + 4)));
  }
  for (; j + 4 <= len; j += 4) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + j), _mm256_loadu_pd(b + j)));
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; j < len; ++j) s += a[j] * b[j];
  return s;
}

double combination_abs_max_avx2(const double* coeffs, std::size_t nrows, const double* rows,
                                std::size_t stride, std::size_t cols) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d best4 = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= cols; j += 4) {
    __m256d s = _mm256_setzero_pd();
    for (std::size_t m = 0; m < nrows; ++m) {
      const __m256d c = _mm256_set1_pd(coeffs[m]);
      s = _mm256_add_pd(s, _mm256_mul_pd(c, _mm256_loadu_pd(rows + m * stride + j)));
    }
    best4 = _mm256_max_pd(best4, _mm256_andnot_pd(sign_mask, s));
  }
  double best = hmax(best4);
  for (; j < cols; ++j) {
    double s = 0.0;
    for (std::size_t m = 0; m < nrows; ++m) s += coeffs[m] * rows[m * stride + j];
    best = std::fmax(best, std::fabs(s));
  }
  return best;
}

}  // namespace

namespace detail {
const KernelTable kAvx2{"avx2", &dot_avx2, &combination_abs_max_avx2};
}

}  // namespace qsn::kernels
