#pragma once

#include <ostream>

namespace curvflow::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInvariantViolation = 2 };

/// Entry point of the `curvflow` tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace curvflow::cli
