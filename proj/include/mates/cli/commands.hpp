#pragma once

#include <ostream>

namespace mates::cli {

/// Exit codes: 0 success, 1 internal error, 2 usage, 3 data or I/O,
/// 4 degenerate statistic.
enum ExitCode : int { kOk = 0, kInternal = 1, kUsage = 2, kData = 3, kDegenerate = 4 };

/// Entry point for the `mates` executable. `out` receives results written to
/// stdout, `err` receives messages and progress.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mates::cli
