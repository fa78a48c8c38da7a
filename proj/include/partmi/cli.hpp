#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace partmi::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kUndefinedNormalization = 2,
  kBudgetExceeded = 3,
  kBoundViolated = 4,
};

/// Runs the partmi command line; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace partmi::cli
