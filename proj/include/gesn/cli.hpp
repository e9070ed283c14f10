#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gesn::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

/// Runs the `gesn` command line (subcommands stats, run, grid, sweep, synth)
/// writing normal output to `out` and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace gesn::cli
