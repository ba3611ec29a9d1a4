#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stackcast::cli {

// Subcommands: synth, ingest, features, link, backtest, ensemble, report and
// run (ingest through report). Returns the process exit code: 0 on success,
// 1 for bad data or settings, 2 for bad command-line usage.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stackcast::cli
