#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mdsplus::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kSuccess = 0, kFailure = 1, kInputError = 2, kUsageError = 3 };

/// Runs the command line `args` (args[0] is the program name). Results go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Locale-independent formatting at 12 significant digits.
std::string format12(double value);

}  // namespace mdsplus::cli
