#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace perimap {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kExitOk = 0,        // checks passed, solve converged
  kExitFinding = 1,   // violation, non-convergence or period-2 point found
  kExitUsage = 2,     // usage, parse or schema error
};

/// Runs one CLI invocation. `args` excludes the program name. Reports go to
/// `out` unless --out names a file; diagnostics go to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace perimap
