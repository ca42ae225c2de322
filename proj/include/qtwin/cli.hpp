#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qtwin::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kUsageError = 1,     // bad flags, unreadable or malformed input, bad config
  kOpenGeometry = 2,   // sequence not closed in phase space
  kNumericFailure = 3, // inconsistency or oracle residual above tolerance
};

/// Runs the tool on `args` (without the program name). Results go to `out`
/// unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qtwin::cli
