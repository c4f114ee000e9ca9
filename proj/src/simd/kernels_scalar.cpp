#include "mates/simd/kernels.hpp"

#include <cmath>

namespace mates::simd {
namespace {

template <typename Op>
inline double lane_reduce(const double* a, const double* b, std::size_t len, Op op) {
  double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    l0 += op(a[i], b[i]);
    l1 += op(a[i + 1], b[i + 1]);
    l2 += op(a[i + 2], b[i + 2]);
    l3 += op(a[i + 3], b[i + 3]);
  }
  double acc = (l0 + l2) + (l1 + l3);
  for (; i < len; ++i) acc += op(a[i], b[i]);
  return acc;
}

double l1_distance(const double* a, const double* b, std::size_t len) {
  return lane_reduce(a, b, len, [](double x, double y) { return std::fabs(x - y); });
}

double sq_l2_distance(const double* a, const double* b, std::size_t len) {
  return lane_reduce(a, b, len, [](double x, double y) {
    const double t = x - y;
    return t * t;
  });
}

double dot(const double* a, const double* b, std::size_t len) {
  return lane_reduce(a, b, len, [](double x, double y) { return x * y; });
}

double sum(const double* a, std::size_t len) {
  return lane_reduce(a, a, len, [](double x, double) { return x; });
}

}  // namespace

const KernelTable& scalar_kernels() noexcept {
  static const KernelTable table{Level::scalar, &l1_distance, &sq_l2_distance, &dot, &sum};
  return table;
}

}  // namespace mates::simd
