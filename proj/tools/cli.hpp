#pragma once

#include <iosfwd>

namespace auvplan::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 2,
  kValidation = 3,
  kVerification = 4,
  kRolloutStuck = 5,
  kRolloutStepLimit = 6,
};

/// Runs one command line (argv[0] is the program name).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace auvplan::cli
