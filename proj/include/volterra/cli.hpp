#pragma once

#include <ostream>

namespace volterra::cli {

/// Exit codes of run_cli.
enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kInvalidProblem = 2,  // validation, config or missing-file errors
  kSolverFailure = 3,
};

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace volterra::cli
