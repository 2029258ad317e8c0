#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pvgp/forecast.hpp"

namespace pvgp {

/// Raw inputs for a grid run; series are assembled per cell because the patch
/// size and window vary.
struct GridDataset {
  UtcTime epoch;
  std::vector<PvSystem> systems;
  PowerSeries power;
  HrvRasterStack hrv;
  AssembleOptions assemble;
};

struct DaySample {
  TimeIndex start;
  double mae = 0.0;
  double mae_daylight = 0.0;
};

/// One system's result for one configuration.
struct CellResult {
  SystemId system_id = 0;
  bool ok = false;
  std::string failure;            // reason when !ok
  double mae = 0.0;               // mean over launch days
  double mae_daylight = 0.0;      // mean over days with daylight
  std::vector<DaySample> days;
};

struct ReportRow {
  std::string key;  // zero-padded row index: sorts in configuration order
  ExperimentConfig config;
  std::vector<CellResult> cells;  // one per system, ascending id
  double average_mae = 0.0;       // mean of successful cells; NaN if none
  std::size_t failed = 0;
};

struct ExperimentReport {
  std::string title;
  std::uint64_t seed = 0;
  UtcTime epoch;  // TimeIndex 0 of every launch
  std::vector<SystemId> systems;
  std::vector<ReportRow> rows;
};

/// Runs every (configuration, system, launch day). Failures are recorded per
/// cell and never abort the run. Output does not depend on `jobs`.
ExperimentReport run_grid(const std::vector<ExperimentConfig>& configs,
                          const GridDataset& data, std::uint64_t seed,
                          int jobs = 1, std::string title = {});

/// The ten rows of the 48 h study: training period at 2x2 / Matern12, sky
/// coverage at three weeks, kernel at three weeks / 2x2. `base` supplies the
/// launch day, test days, stride, restarts and systems.
std::vector<ExperimentConfig> set_one_grid(const ExperimentConfig& base);

/// The 4 h study: {6x6, 12x12} x {given, persistence} at three weeks with the
/// periodic Matern12 kernel.
std::vector<ExperimentConfig> set_two_grid(const ExperimentConfig& base);

std::string training_period_label(int days);

}  // namespace pvgp
