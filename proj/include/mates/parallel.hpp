#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace mates {

/// Threads to use: `requested` if nonzero, else MATES_THREADS, else the
/// hardware concurrency.
unsigned resolve_threads(unsigned requested);

/// Runs body(i) for i in [0, count) on up to `threads` workers. Work is
/// handed out in index order; results must be written to per-index slots.
/// The first exception thrown by any body is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

/// Independent generator for (master seed, stream index, purpose tag). The
/// same triple always yields the same sequence, whatever the thread layout.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index, std::uint64_t tag = 0);

}  // namespace mates
