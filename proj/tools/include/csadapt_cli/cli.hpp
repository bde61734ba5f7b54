#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace csadapt::cli {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;        // bad flags, bad config, unreadable or unwritable files
inline constexpr int kExitComputation = 2;  // dimension mismatch, degenerate input, non-convergence

/// Parses `args` (args[0] is the program name), dispatches to a subcommand
/// and returns the exit code. Errors are reported on `err` as one JSON line:
/// {"error": "<kind>", "message": "..."}.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Build identifier printed by --version.
std::string version_string();

}  // namespace csadapt::cli
