#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace pvgp::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;      // usage, configuration or data error
inline constexpr int kExitNumerical = 3;  // numerical failure

/// Each command writes effective_config.json plus its outputs into
/// config.output_dir and a human summary to `out`. Errors propagate as
/// pvgp exceptions.
void cmd_ingest(const RunConfig& config, std::ostream& out);
void cmd_synth(const RunConfig& config, std::ostream& out);
void cmd_fit(const RunConfig& config, std::ostream& out);
void cmd_forecast(const RunConfig& config, std::ostream& out);
void cmd_experiment(const RunConfig& config, std::ostream& out);
void cmd_report(const RunConfig& config, std::ostream& out);

/// Full command line without the program name, e.g.
/// {"experiment", "--config", "run.json", "--seed", "7"}. Never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace pvgp::cli
