#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "bess/config.hpp"
#include "bess/errors.hpp"

namespace bess {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitData = 3, kExitRuntime = 4 };

int exit_code_for(ErrorKind kind);

// Runs every configured scenario and writes, under config.output_dir:
//   prices.csv, scenario_<id>/ (RunLog directory), report.txt, report.csv, report.json, effective_config.json.
std::vector<KpiReport> cmd_run(const RunConfig& config, std::ostream& out);
// Same outputs plus comparison.txt; defaults to scenarios I-IV when called from the CLI.
std::vector<KpiReport> cmd_compare(const RunConfig& config, std::ostream& out);

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace bess
