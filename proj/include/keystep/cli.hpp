#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace keystep {

/// Exit statuses of the command-line front end.
enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitFormat = 3 };

/// Runs the `keystep` command line. Data goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace keystep
