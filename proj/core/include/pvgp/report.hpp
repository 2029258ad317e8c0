#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pvgp/forecast.hpp"
#include "pvgp/grid.hpp"
#include "pvgp/metrics.hpp"

namespace pvgp {

// Wide report, one line per configuration:
//   row,block,training_days,patch_px,kernel,horizon,cloud_mode,
//   system_<id>...,average_mae_w,failed,failures
// System cells hold the MAE in watts or FAILED.
std::string report_csv(const ExperimentReport& report);

// Long form, one line per (configuration, system, launch):
//   row,system_id,forecast_start_utc,time_index,mae_w,mae_daylight_w
std::string day_samples_csv(const ExperimentReport& report);

/// Aligned text table with one line per configuration (training period, sky
/// coverage, kernel, one column per system, average).
std::string render_config_table(const ExperimentReport& report);

/// Aligned text table with one line per system and one column per
/// configuration, closed by an average line.
std::string render_system_table(const ExperimentReport& report);

enum class BoxGroupBy { TestingDay, System };

struct BoxGroup {
  std::string row;
  std::string group;
  BoxSummary box;
};

struct BoxPlotData {
  std::vector<BoxGroup> groups;
  std::vector<std::string> warnings;  // groups omitted for lack of samples
};

BoxPlotData export_boxplot_data(const ExperimentReport& report,
                                BoxGroupBy group_by);

/// One line of day_samples_csv.
struct DaySampleRecord {
  std::string row;
  SystemId system_id = 0;
  std::int64_t time_index = 0;
  double mae = 0.0;
  double mae_daylight = 0.0;  // NaN when the horizon had no daylight
};

std::vector<DaySampleRecord> day_sample_records(const ExperimentReport& report);
std::vector<DaySampleRecord> read_day_samples_csv(const std::filesystem::path& path);

/// Groups are formed within each row, in row order.
BoxPlotData boxplot_from_samples(const std::vector<DaySampleRecord>& samples,
                                 BoxGroupBy group_by);

// row,group,n,min,q1,median,q3,max,lower_whisker,upper_whisker,outliers
// (outliers separated by ';')
std::string boxplot_csv(const BoxPlotData& data);

/// One forecast as `time_index,timestamp_utc,mean_w,sd_w`.
struct PredictionRow {
  std::int64_t time_index = 0;
  UtcTime timestamp;
  double mean_w = 0.0;
  double sd_w = 0.0;
};

std::vector<PredictionRow> prediction_rows(const ForecastResult& forecast,
                                           UtcTime epoch);
std::string prediction_csv(const std::vector<PredictionRow>& rows);
std::vector<PredictionRow> read_prediction_csv(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace pvgp
