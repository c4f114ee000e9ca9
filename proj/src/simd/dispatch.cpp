#include "mates/simd/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace mates::simd {
namespace {

bool cpu_supports(Level level) noexcept {
  switch (level) {
    case Level::scalar:
      return true;
    case Level::avx2:
#if defined(MATES_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Level::neon:
#if defined(MATES_BUILD_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& select() noexcept {
  if (const char* forced = std::getenv("MATES_SIMD")) {
    const std::string_view want{forced};
    for (Level level : available_levels()) {
      if (to_string(level) == want) return kernels_for(level);
    }
  }
  const auto levels = available_levels();
  return kernels_for(levels.back());
}

}  // namespace

std::vector<Level> available_levels() {
  std::vector<Level> out{Level::scalar};
  for (Level level : {Level::avx2, Level::neon}) {
    if (cpu_supports(level)) out.push_back(level);
  }
  return out;
}

const KernelTable& kernels_for(Level level) {
  if (!cpu_supports(level)) {
    throw std::invalid_argument("SIMD level not available: " + std::string(to_string(level)));
  }
  switch (level) {
#if defined(MATES_BUILD_AVX2)
    case Level::avx2:
      return avx2_kernels();
#endif
#if defined(MATES_BUILD_NEON)
    case Level::neon:
      return neon_kernels();
#endif
    default:
      return scalar_kernels();
  }
}

const KernelTable& active() noexcept {
  static const KernelTable& table = select();
  return table;
}

std::string_view to_string(Level level) noexcept {
  switch (level) {
    case Level::scalar:
      return "scalar";
    case Level::avx2:
      return "avx2";
    case Level::neon:
      return "neon";
  }
  return "unknown";
}

}  // namespace mates::simd
