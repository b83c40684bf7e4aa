#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace isosim::cli {

// Entry point of the `isosim` tool. Subcommands: similarity, cluster, sweep,
// simulate, contour, bench, detect, curve. Returns the process exit status;
// diagnostics go to `err`, summaries to `out`.
//
// `--config FILE` (anywhere on the line) reads flat `key = value` lines whose
// keys are long option names of the chosen subcommand; flags given on the
// command line override file values. Every output file starts with '#'
// provenance lines (tool version, subcommand, full effective configuration).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace isosim::cli
