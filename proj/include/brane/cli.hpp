#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace brane {

/// Process exit codes of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitDegenerate = 3,
    kExitGuard = 4,
};

/// Subcommands: simulate, charges, residuals, characteristics, converge,
/// compare. Errors are reported as one JSON line on `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace brane
