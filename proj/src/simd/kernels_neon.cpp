#include "mates/simd/kernels.hpp"

#include <arm_neon.h>

#include <cmath>

namespace mates::simd {
namespace {

// Two 2-lane registers hold lanes {0,1} and {2,3}.
inline double fold(float64x2_t l01, float64x2_t l23) {
  const float64x2_t pair = vaddq_f64(l01, l23);
  return vgetq_lane_f64(pair, 0) + vgetq_lane_f64(pair, 1);
}

double l1_distance(const double* a, const double* b, std::size_t len) {
  float64x2_t l01 = vdupq_n_f64(0.0), l23 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    l01 = vaddq_f64(l01, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    l23 = vaddq_f64(l23, vabdq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double r = fold(l01, l23);
  for (; i < len; ++i) r += std::fabs(a[i] - b[i]);
  return r;
}

double sq_l2_distance(const double* a, const double* b, std::size_t len) {
  float64x2_t l01 = vdupq_n_f64(0.0), l23 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    const float64x2_t d01 = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    const float64x2_t d23 = vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    l01 = vaddq_f64(l01, vmulq_f64(d01, d01));
    l23 = vaddq_f64(l23, vmulq_f64(d23, d23));
  }
  double r = fold(l01, l23);
  for (; i < len; ++i) {
    const double t = a[i] - b[i];
    r += t * t;
  }
  return r;
}

double dot(const double* a, const double* b, std::size_t len) {
  float64x2_t l01 = vdupq_n_f64(0.0), l23 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    l01 = vaddq_f64(l01, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    l23 = vaddq_f64(l23, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double r = fold(l01, l23);
  for (; i < len; ++i) r += a[i] * b[i];
  return r;
}

double sum(const double* a, std::size_t len) {
  float64x2_t l01 = vdupq_n_f64(0.0), l23 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    l01 = vaddq_f64(l01, vld1q_f64(a + i));
    l23 = vaddq_f64(l23, vld1q_f64(a + i + 2));
  }
  double r = fold(l01, l23);
  for (; i < len; ++i) r += a[i];
  return r;
}

}  // namespace

const KernelTable& neon_kernels() noexcept {
  static const KernelTable table{Level::neon, &l1_distance, &sq_l2_distance, &dot, &sum};
  return table;
}

}  // namespace mates::simd
