#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace leadlag::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kAnalysis = 3 };

/// Runs one command line (without the program name), writing normal output
/// to `out` and diagnostics to `err`. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace leadlag::cli
