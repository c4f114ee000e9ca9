#include "mates/simd/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace mates::simd {
namespace {

inline double fold(__m256d v) {
  // [l0 + l2, l1 + l3], then the two halves.
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  const __m128d swapped = _mm_unpackhi_pd(pair, pair);
  return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

double l1_distance(const double* a, const double* b, std::size_t len) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_andnot_pd(sign, d));
  }
  double r = fold(acc);
  for (; i < len; ++i) r += std::fabs(a[i] - b[i]);
  return r;
}

double sq_l2_distance(const double* a, const double* b, std::size_t len) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double r = fold(acc);
  for (; i < len; ++i) {
    const double t = a[i] - b[i];
    r += t * t;
  }
  return r;
}

double dot(const double* a, const double* b, std::size_t len) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double r = fold(acc);
  for (; i < len; ++i) r += a[i] * b[i];
  return r;
}

double sum(const double* a, std::size_t len) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double r = fold(acc);
  for (; i < len; ++i) r += a[i];
  return r;
}

}  // namespace

const KernelTable& avx2_kernels() noexcept {
  static const KernelTable table{Level::avx2, &l1_distance, &sq_l2_distance, &dot, &sum};
  return table;
}

}  // namespace mates::simd
