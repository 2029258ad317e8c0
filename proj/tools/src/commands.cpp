#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "pvgp/csv.hpp"
#include "pvgp/error.hpp"
#include "pvgp/grid.hpp"
#include "pvgp/report.hpp"

namespace pvgp::cli {

namespace fs = std::filesystem;

namespace {

struct Inputs {
  UtcTime epoch;
  std::vector<PvSystem> systems;  // survivors of the filters
  PowerSeries power;
  HrvRasterStack hrv;
  bool has_hrv = false;
  std::vector<RowDiagnostic> skipped;
  std::vector<Removal> removed;
};

fs::path prepare_output(const RunConfig& config) {
  fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw DataError("cannot create output directory " + dir.string());
  return dir;
}

void write_effective_config(const RunConfig& config, const fs::path& dir) {
  write_text_file(dir / "effective_config.json", to_json(config).dump(2) + "\n");
}

HrvRasterStack read_hrv(const DataSection& d) {
  std::string format = d.hrv_format;
  if (format == "auto") format = fs::path(d.hrv).extension() == ".csv" ? "csv" : "binary";
  if (format == "binary") return read_hrv_binary(d.hrv);
  if (d.hrv_csv_geometry.width == 0 || d.hrv_csv_geometry.height == 0)
    throw ConfigError("data.hrv_csv_geometry must give width and height for CSV rasters");
  return read_hrv_csv(d.hrv, d.hrv_csv_geometry);
}

Inputs load_files(const RunConfig& config, bool need_hrv) {
  if (config.data.metadata.empty() || config.data.power.empty())
    throw ConfigError("data.metadata and data.power are required");
  const TransverseMercator tm(config.projection);
  MetadataLoad meta = load_metadata(config.data.metadata, tm);
  PowerLoad power = load_power(config.data.power);
  if (!power.epoch) throw EmptyDatasetError("no usable power readings in " + config.data.power);

  Inputs in;
  in.epoch = *power.epoch;
  in.skipped = std::move(meta.skipped);
  in.skipped.insert(in.skipped.end(), power.skipped.begin(), power.skipped.end());
  FilterResult filtered =
      filter_systems(meta.systems, power.series, filter_options(config.filter));
  in.systems = std::move(filtered.kept);
  in.removed = std::move(filtered.removed);
  in.power = std::move(power.series);
  if (!config.data.hrv.empty()) {
    in.hrv = read_hrv(config.data);
    in.has_hrv = true;
  } else if (need_hrv) {
    throw ConfigError("data.hrv is required");
  }
  return in;
}

Inputs load_synthetic(const RunConfig& config) {
  const TransverseMercator tm(config.projection);
  SyntheticBundle b = generate_synthetic(
      parse_scenario(config.synth.scenario), config.synth.days,
      synthetic_systems(config.synth, tm), config.seed, synthetic_options(config.synth));
  Inputs in;
  in.epoch = b.epoch;
  FilterResult filtered =
      filter_systems(b.systems, b.power, filter_options(config.filter));
  in.systems = std::move(filtered.kept);
  in.removed = std::move(filtered.removed);
  in.power = std::move(b.power);
  in.hrv = std::move(b.hrv);
  in.has_hrv = true;
  return in;
}

// Files when a power file is configured, otherwise the synth section.
Inputs load_inputs(const RunConfig& config, bool need_hrv) {
  return config.data.power.empty() ? load_synthetic(config) : load_files(config, need_hrv);
}

const PvSystem& pick_system(const Inputs& in, std::optional<SystemId> id) {
  if (!id) {
    if (in.systems.empty()) throw DataError("no system survived the filters");
    return in.systems.front();
  }
  for (const PvSystem& s : in.systems)
    if (s.system_id == *id) return s;
  for (const Removal& r : in.removed)
    if (r.system_id == *id)
      throw DataError("system " + std::to_string(*id) + " was removed (" +
                      reason_code(r.reason) + ")");
  throw DataError("unknown system " + std::to_string(*id));
}

ExperimentConfig model_config(const ModelSection& m) {
  ExperimentConfig c;
  c.training_days = m.training_days;
  c.patch_px = m.patch_px;
  c.kernel = kernel_template(m);
  c.training_stride = m.training_stride;
  c.restarts = m.restarts;
  c.use_hrv = m.use_hrv;
  return c;
}

// Midnight of the first day with `days` of history before it, plus the hour.
TimeIndex default_launch(int days, int hour) {
  return TimeIndex{static_cast<std::int64_t>(days) * kStepsPerDay + hour * 12};
}

TimeIndex resolve_start(const std::string& text, UtcTime epoch) {
  return timestamp_to_index(parse_utc(text), epoch);
}

struct PreparedForecast {
  PvSystem system;
  ExperimentConfig cfg;
  TimeIndex start;
  AssembledSeries series;
  UtcTime epoch;
};

PreparedForecast prepare_forecast(RunConfig& config, const Inputs& in) {
  PreparedForecast p;
  p.epoch = in.epoch;
  p.system = pick_system(in, config.forecast.system_id);
  config.forecast.system_id = p.system.system_id;
  p.cfg = model_config(config.forecast.model);
  p.cfg.horizon = parse_horizon(config.forecast.horizon);
  p.cfg.cloud_mode = parse_cloud_mode(config.forecast.cloud_mode);
  if (config.forecast.start.empty()) {
    const int hour = p.cfg.horizon == Horizon::FourHours ? 10 : 0;
    p.start = default_launch(p.cfg.training_days, hour);
    config.forecast.start = format_utc(index_to_timestamp(p.start, in.epoch));
  } else {
    p.start = resolve_start(config.forecast.start, in.epoch);
  }
  p.cfg.forecast_start = p.start;
  p.cfg.system_ids = {p.system.system_id};
  p.cfg.validate();
  const TimeIndex begin{p.start.value - p.cfg.training_days * kStepsPerDay};
  const TimeIndex end{p.start.value + horizon_steps(p.cfg.horizon)};
  p.series = assemble(p.system, in.power, in.hrv, p.cfg.patch_px, begin, end, in.epoch,
                      AssembleOptions{config.data.sensor_max});
  return p;
}

std::string fixed(double v, int digits = 2) {
  if (!std::isfinite(v)) return "n/a";
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

std::vector<ExperimentConfig> build_grid(const RunConfig& config,
                                         const ExperimentConfig& base) {
  const ExperimentSection& e = config.experiment;
  if (e.grid == "set-one") return set_one_grid(base);
  if (e.grid == "set-two") return set_two_grid(base);
  std::vector<ExperimentConfig> out;
  for (const GridRow& row : e.rows) {
    ExperimentConfig c = model_config(row.model);
    c.horizon = parse_horizon(row.horizon);
    c.cloud_mode = parse_cloud_mode(row.cloud_mode);
    c.block = row.block;
    c.forecast_start = base.forecast_start;
    c.test_days = base.test_days;
    c.system_ids = base.system_ids;
    out.push_back(std::move(c));
  }
  return out;
}

// Renders a simple CSV (no quoting) as aligned columns.
std::string align_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(split_csv_line(line));
  std::vector<std::size_t> width;
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (width.size() <= i) width.push_back(0);
      width[i] = std::max(width[i], r[i].size());
    }
  std::ostringstream out;
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      out << r[i];
      if (i + 1 < r.size()) out << std::string(width[i] - r[i].size() + 2, ' ');
    }
    out << '\n';
  }
  return out.str();
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

void cmd_ingest(const RunConfig& config_in, std::ostream& out) {
  RunConfig config = config_in;
  const fs::path dir = prepare_output(config);
  const Inputs in = load_inputs(config, false);
  write_effective_config(config, dir);

  std::ostringstream s;
  s << "epoch " << format_utc(in.epoch) << '\n';
  s << "skipped rows " << in.skipped.size() << '\n';
  for (const RowDiagnostic& d : in.skipped)
    s << "  " << d.source << ':' << d.line << ": " << d.reason << '\n';
  s << "kept " << in.systems.size() << '\n';
  s << "removed " << in.removed.size() << '\n';
  for (const Removal& r : in.removed)
    s << "  " << r.system_id << ' ' << reason_code(r.reason)
      << (r.detail.empty() ? "" : " (" + r.detail + ")") << '\n';
  if (in.has_hrv) {
    const int patch = config.forecast.model.patch_px;
    for (const PvSystem& sys : in.systems) {
      const auto& readings = in.power.at(sys.system_id);
      const TimeIndex end{timestamp_to_index(readings.back().time, in.epoch).value + 1};
      s << "system " << sys.system_id << ' ';
      try {
        const AssembledSeries a =
            assemble(sys, in.power, in.hrv, patch, TimeIndex{0}, end, in.epoch,
                     AssembleOptions{config.data.sensor_max});
        s << "rows " << a.rows.size() << " gaps " << a.gaps() << " invalid "
          << a.invalid_power << " patch " << patch << "x" << patch << '\n';
      } catch (const DataError& e) {
        s << "not assembled: " << e.what() << '\n';
      }
    }
  }
  write_text_file(dir / "ingest_summary.txt", s.str());
  out << s.str();
}

void cmd_synth(const RunConfig& config, std::ostream& out) {
  const fs::path dir = prepare_output(config);
  const TransverseMercator tm(config.projection);
  const SyntheticBundle b = generate_synthetic(
      parse_scenario(config.synth.scenario), config.synth.days,
      synthetic_systems(config.synth, tm), config.seed, synthetic_options(config.synth));
  write_metadata_csv(dir / "metadata.csv", b.systems);
  write_power_csv(dir / "power.csv", b.power);
  const bool csv = config.synth.hrv_format == "csv";
  const fs::path hrv = dir / (csv ? "hrv.csv" : "hrv.bin");
  if (csv) write_hrv_csv(hrv, b.hrv);
  else write_hrv_binary(hrv, b.hrv);
  write_effective_config(config, dir);

  const RasterGeometry& g = b.hrv.geometry();
  out << "scenario " << config.synth.scenario << ", " << config.synth.days << " days, "
      << b.systems.size() << " systems\n"
      << "raster " << g.width << 'x' << g.height << " px, origin ("
      << format_double(g.origin_easting) << ", " << format_double(g.origin_northing)
      << "), " << b.hrv.frames().size() << " frames\n"
      << "wrote " << (dir / "metadata.csv").string() << ", "
      << (dir / "power.csv").string() << ", " << hrv.string() << '\n';
}

void cmd_fit(const RunConfig& config_in, std::ostream& out) {
  RunConfig config = config_in;
  const fs::path dir = prepare_output(config);
  const Inputs in = load_inputs(config, true);
  const PreparedForecast p = prepare_forecast(config, in);
  write_effective_config(config, dir);

  const TrainingSet train = training_set_for(p.series, p.cfg, p.start);
  FitOptions opt;
  opt.restarts = p.cfg.restarts;
  opt.seed = fit_seed(config.seed, p.system.system_id, p.start, p.cfg);
  opt.jobs = config.jobs;
  const FitResult fit = fit_hyperparameters(train, p.cfg.kernel, opt);

  std::ostringstream s;
  s << "system " << p.system.system_id << '\n'
    << "launch " << format_utc(index_to_timestamp(p.start, p.epoch)) << '\n'
    << "training_points " << train.size() << '\n'
    << "kernel " << to_string(fit.spec) << '\n'
    << "log_likelihood " << format_double(fit.log_likelihood) << '\n'
    << "best_restart " << fit.best_restart << '\n';
  for (std::size_t i = 0; i < fit.restarts.size(); ++i)
    s << "restart " << i << " log_likelihood "
      << format_double(fit.restarts[i].log_likelihood) << " iterations "
      << fit.restarts[i].iterations << '\n';
  write_text_file(dir / "fit.txt", s.str());
  out << s.str();
}

void cmd_forecast(const RunConfig& config_in, std::ostream& out) {
  RunConfig config = config_in;
  const fs::path dir = prepare_output(config);
  const Inputs in = load_inputs(config, true);
  const PreparedForecast p = prepare_forecast(config, in);
  write_effective_config(config, dir);

  const ForecastResult r =
      run_forecast(p.series, p.cfg, p.start,
                   fit_seed(config.seed, p.system.system_id, p.start, p.cfg), config.jobs);
  const fs::path csv = dir / "prediction.csv";
  write_text_file(csv, prediction_csv(prediction_rows(r, p.epoch)));
  out << "system " << p.system.system_id << ", launch "
      << format_utc(index_to_timestamp(p.start, p.epoch)) << ", "
      << horizon_label(p.cfg.horizon) << ", " << cloud_mode_label(p.cfg.cloud_mode) << '\n'
      << "kernel " << to_string(r.fitted) << '\n'
      << "mae_w " << fixed(r.mae) << " (daylight " << fixed(r.mae_daylight) << ")\n"
      << "wrote " << csv.string() << " (" << r.clamped_mean.size() << " rows)\n";
}

void cmd_experiment(const RunConfig& config_in, std::ostream& out) {
  RunConfig config = config_in;
  const fs::path dir = prepare_output(config);
  ExperimentSection& e = config.experiment;
  if (e.grid == "custom" && e.rows.empty())
    throw ConfigError("experiment.rows is empty: nothing to run");
  const Inputs in = e.source == "synthetic" ? load_synthetic(config) : load_files(config, true);

  ExperimentConfig base;
  base.test_days = e.test_days;
  base.training_stride = e.training_stride;
  base.restarts = e.restarts;
  base.system_ids = e.system_ids;
  std::vector<ExperimentConfig> grid = build_grid(config, base);
  if (grid.empty()) throw ConfigError("experiment grid is empty");

  if (e.forecast_start.empty()) {
    int days = 0;
    bool all_short = true;
    for (const auto& c : grid) {
      days = std::max(days, c.training_days);
      all_short = all_short && c.horizon == Horizon::FourHours;
    }
    if (e.launch_hour < 0) e.launch_hour = all_short ? 10 : 0;
    base.forecast_start = default_launch(days, e.launch_hour);
    e.forecast_start = format_utc(index_to_timestamp(base.forecast_start, in.epoch));
  } else {
    base.forecast_start = resolve_start(e.forecast_start, in.epoch);
  }
  grid = build_grid(config, base);
  for (const auto& c : grid) c.validate();
  write_effective_config(config, dir);

  GridDataset data{in.epoch, in.systems, in.power, in.hrv,
                   AssembleOptions{config.data.sensor_max}};
  const ExperimentReport report = run_grid(grid, data, config.seed, config.jobs, e.title);

  write_text_file(dir / "report.csv", report_csv(report));
  write_text_file(dir / "day_samples.csv", day_samples_csv(report));
  const std::string tables =
      render_config_table(report) + "\n" + render_system_table(report);
  write_text_file(dir / "report.txt", tables);
  const BoxPlotData by_day = export_boxplot_data(report, BoxGroupBy::TestingDay);
  const BoxPlotData by_system = export_boxplot_data(report, BoxGroupBy::System);
  write_text_file(dir / "boxplot_testing_day.csv", boxplot_csv(by_day));
  write_text_file(dir / "boxplot_system.csv", boxplot_csv(by_system));

  out << tables;
  std::size_t failed = 0;
  for (const ReportRow& row : report.rows) failed += row.failed;
  if (failed) out << failed << " failed cell(s); see report.csv\n";
  for (const auto& w : by_day.warnings) out << "warning: " << w << '\n';
  for (const auto& w : by_system.warnings) out << "warning: " << w << '\n';
  out << "wrote " << dir.string() << '\n';
}

void cmd_report(const RunConfig& config, std::ostream& out) {
  const fs::path input = config.report.input.empty() ? fs::path(config.output_dir)
                                                     : fs::path(config.report.input);
  const fs::path dir = prepare_output(config);
  write_effective_config(config, dir);

  if (fs::exists(input / "prediction.csv") && !fs::exists(input / "report.csv")) {
    const auto rows = read_prediction_csv(input / "prediction.csv");
    double max_sd = 0.0, energy = 0.0;
    for (const auto& r : rows) {
      max_sd = std::max(max_sd, r.sd_w);
      energy += r.mean_w * kStepSeconds / 3600.0;
    }
    out << "prediction rows " << rows.size() << '\n'
        << "predicted energy_wh " << fixed(energy) << '\n'
        << "max sd_w " << fixed(max_sd) << '\n';
    return;
  }

  out << align_csv(read_text(input / "report.csv"));
  const BoxGroupBy group = config.report.group_by == "system" ? BoxGroupBy::System
                                                              : BoxGroupBy::TestingDay;
  const BoxPlotData box = boxplot_from_samples(read_day_samples_csv(input / "day_samples.csv"), group);
  const std::string csv = boxplot_csv(box);
  const fs::path target = dir / ("boxplot_" + std::string(group == BoxGroupBy::System
                                                              ? "system" : "testing_day") + ".csv");
  write_text_file(target, csv);
  out << '\n' << align_csv(csv);
  for (const auto& w : box.warnings) out << "warning: " << w << '\n';
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian-process PV power forecasting", "pvgp"};
  app.require_subcommand(1);
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string output;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Override the configured seed");
  app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--output", output, "Override output_dir");

  using Command = void (*)(const RunConfig&, std::ostream&);
  const std::vector<std::pair<std::string, Command>> commands{
      {"ingest", cmd_ingest},     {"synth", cmd_synth},
      {"fit", cmd_fit},           {"forecast", cmd_forecast},
      {"experiment", cmd_experiment}, {"report", cmd_report}};
  const std::vector<std::string> help{
      "Load, filter and assemble a dataset and summarise it",
      "Generate a synthetic dataset bundle",
      "Fit kernel hyperparameters for one system and launch",
      "Forecast one system and write prediction.csv",
      "Run an experiment grid and write reports",
      "Render tables and box-plot data from an experiment directory"};
  for (std::size_t i = 0; i < commands.size(); ++i)
    app.add_subcommand(commands[i].first, help[i])->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig config = config_path.empty()
                           ? parse_run_config(Json::object(), fs::current_path())
                           : load_run_config(config_path);
    if (seed) config.seed = *seed;
    if (jobs) config.jobs = *jobs;
    if (!output.empty()) config.output_dir = fs::absolute(output).lexically_normal().string();
    for (const auto& [name, fn] : commands)
      if (app.got_subcommand(name)) fn(config, out);
    return kExitOk;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace pvgp::cli
