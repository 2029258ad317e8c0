#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pvgp/forecast.hpp"
#include "pvgp/hrv.hpp"
#include "pvgp/pipeline.hpp"
#include "pvgp/projection.hpp"
#include "pvgp/synthetic.hpp"

namespace pvgp::cli {

using Json = nlohmann::ordered_json;

struct SystemEntry {
  SystemId system_id = 0;
  double latitude = 0.0;
  double longitude = 0.0;
  double capacity_w = 0.0;
};

struct DataSection {
  std::string metadata;
  std::string power;
  std::string hrv;
  std::string hrv_format = "auto";  // auto | binary | csv
  RasterGeometry hrv_csv_geometry;  // georeferencing for the CSV fallback
  double sensor_max = kDefaultSensorMax;
};

struct FilterSection {
  std::vector<GridCoordinate> boundary;  // empty: national grid extent
  double night_threshold_deg = -5.0;
  double overnight_fraction = 0.01;
  int overnight_nights = 3;
};

struct SynthSection {
  std::string scenario = "scattered";
  int days = 14;
  std::string start = "2021-06-01T00:00:00Z";
  std::vector<SystemEntry> systems;
  double attenuation = 0.9;
  double overcast_fraction = 1.0;
  double clear_hrv = 150.0;
  double cloud_hrv = 900.0;
  int margin_px = 16;
  double pixel_size = 1000.0;
  int block_px = 8;
  int local_px = 6;
  int min_segment_steps = 6;
  int max_segment_steps = 36;
  double noise_fraction = 0.0;
  std::string hrv_format = "binary";  // binary | csv
};

/// Kernel and training window shared by fit, forecast and custom grid rows.
struct ModelSection {
  std::string kernel = "matern12";  // matern12 | matern32 | matern52 | se | rq
  bool periodic = true;
  int training_days = 21;
  int patch_px = 12;
  int training_stride = 1;
  int restarts = 2;
  bool use_hrv = true;
};

struct ForecastSection {
  std::optional<SystemId> system_id;  // empty: first kept system
  std::string start;                  // empty: earliest covered launch
  std::string horizon = "48h";
  std::string cloud_mode = "given";
  ModelSection model;
};

struct GridRow {
  ModelSection model;
  std::string horizon = "48h";
  std::string cloud_mode = "given";
  std::string block;
};

struct ExperimentSection {
  std::string source = "files";  // files | synthetic
  std::string grid = "set-one";  // set-one | set-two | custom
  std::vector<GridRow> rows;     // custom grid
  std::string forecast_start;    // empty: earliest launch with full history
  int launch_hour = -1;          // -1: 0 for set-one, 10 for set-two
  int test_days = 1;
  int training_stride = 1;       // also the default for custom rows
  int restarts = 2;
  std::vector<SystemId> system_ids;
  std::string title;
};

struct ReportSection {
  std::string input;  // directory holding an experiment's output
  std::string group_by = "testing-day";
};

struct RunConfig {
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string output_dir = "pvgp-out";
  ProjectionParams projection;
  DataSection data;
  FilterSection filter;
  SynthSection synth;
  ForecastSection forecast;
  ExperimentSection experiment;
  ReportSection report;
};

/// Parses a configuration document. Unknown keys, wrong types and invalid
/// enumerations throw ConfigError naming the offending key. Relative paths are
/// resolved against `base_dir`.
RunConfig parse_run_config(const Json& doc, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// Every field, defaults included.
Json to_json(const RunConfig& config);

KernelSpec kernel_template(const ModelSection& model);
Horizon parse_horizon(const std::string& text);
CloudMode parse_cloud_mode(const std::string& text);
FilterOptions filter_options(const FilterSection& filter);
SyntheticOptions synthetic_options(const SynthSection& synth);
std::vector<PvSystem> synthetic_systems(const SynthSection& synth,
                                        const TransverseMercator& projection);

}  // namespace pvgp::cli
