#pragma once

// Reduction kernels used by the distance, weight-sum and permutation loops.
//
// Every variant accumulates into four lanes (lane = index mod 4), folds the
// lanes as (l0 + l2) + (l1 + l3), then adds the tail sequentially. The scalar
// reference follows the same order, so all variants return bit-identical
// results and the choice of instruction set never changes a test statistic.

#include <cstddef>
#include <string_view>
#include <vector>

namespace mates::simd {

enum class Level { scalar, avx2, neon };

struct KernelTable {
  Level level;
  /// sum_r |a_r - b_r|
  double (*l1_distance)(const double* a, const double* b, std::size_t len);
  /// sum_r (a_r - b_r)^2
  double (*sq_l2_distance)(const double* a, const double* b, std::size_t len);
  /// sum_r a_r * b_r, multiply and add rounded separately
  double (*dot)(const double* a, const double* b, std::size_t len);
  double (*sum)(const double* a, std::size_t len);
};

const KernelTable& scalar_kernels() noexcept;
#if defined(MATES_BUILD_AVX2)
const KernelTable& avx2_kernels() noexcept;
#endif
#if defined(MATES_BUILD_NEON)
const KernelTable& neon_kernels() noexcept;
#endif

/// Kernels selected for this process. Chosen once from CPU features; the
/// MATES_SIMD environment variable (scalar|avx2|neon) can force a level.
const KernelTable& active() noexcept;

/// Levels that are both compiled in and supported by the running CPU.
std::vector<Level> available_levels();
const KernelTable& kernels_for(Level level);

std::string_view to_string(Level level) noexcept;

}  // namespace mates::simd
