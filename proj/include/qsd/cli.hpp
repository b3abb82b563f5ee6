#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qsd {

/// Exit codes of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitDomain = 2,
};

/// Runs one command. `args` excludes the program name. Tables and JSON go to
/// `out` (or the --output file); diagnostics and summaries go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace qsd
