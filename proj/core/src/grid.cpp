#include "pvgp/grid.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <tuple>

#include "pvgp/error.hpp"
#include "pvgp/parallel.hpp"

namespace pvgp {

namespace {

struct FitKey {
  SystemId system;
  std::int64_t start;
  int training_days;
  int patch_px;
  int stride;
  int restarts;
  bool use_hrv;
  std::string kernel;
  auto tie() const {
    return std::tie(system, start, training_days, patch_px, stride, restarts,
                    use_hrv, kernel);
  }
  bool operator<(const FitKey& o) const { return tie() < o.tie(); }
};

FitKey fit_key(SystemId id, TimeIndex start, const ExperimentConfig& c) {
  return {id, start.value, c.training_days, c.patch_px, c.training_stride,
          c.restarts, c.use_hrv, to_string(c.kernel)};
}

struct FitSlot {
  const ExperimentConfig* config = nullptr;
  const PvSystem* system = nullptr;
  TimeIndex start;
  std::optional<KernelSpec> fitted;
  std::string failure;
};

struct DaySlot {
  std::size_t row = 0;
  std::size_t cell = 0;
  const PvSystem* system = nullptr;
  TimeIndex start;
  const FitSlot* fit = nullptr;
  bool ok = false;
  std::string failure;
  DaySample sample;
};

AssembledSeries assemble_for(const GridDataset& data, const PvSystem& sys,
                             const ExperimentConfig& cfg, TimeIndex start) {
  const TimeIndex begin{start.value - cfg.training_days * kStepsPerDay};
  const TimeIndex end{start.value + horizon_steps(cfg.horizon)};
  return assemble(sys, data.power, data.hrv, cfg.patch_px, begin, end,
                  data.epoch, data.assemble);
}

}  // namespace

std::string training_period_label(int days) {
  switch (days) {
    case 7: return "1 week";
    case 14: return "2 weeks";
    case 21: return "3 weeks";
    case 30: return "1 month";
    default: return std::to_string(days) + " days";
  }
}

ExperimentReport run_grid(const std::vector<ExperimentConfig>& configs,
                          const GridDataset& data, std::uint64_t seed,
                          int jobs, std::string title) {
  if (configs.empty()) throw ConfigError("experiment grid is empty");
  for (const auto& c : configs) c.validate();

  std::map<SystemId, const PvSystem*> by_id;
  for (const auto& s : data.systems) by_id.emplace(s.system_id, &s);

  ExperimentReport report;
  report.title = std::move(title);
  report.seed = seed;
  report.epoch = data.epoch;
  {
    std::map<SystemId, bool> all;
    for (const auto& c : configs) {
      if (c.system_ids.empty()) {
        for (const auto& [id, s] : by_id) all[id] = true;
      } else {
        for (SystemId id : c.system_ids) all[id] = true;
      }
    }
    for (const auto& [id, _] : all) report.systems.push_back(id);
  }

  std::map<FitKey, FitSlot> fits;
  std::vector<DaySlot> days;
  report.rows.resize(configs.size());
  for (std::size_t r = 0; r < configs.size(); ++r) {
    ReportRow& row = report.rows[r];
    char key[16];
    std::snprintf(key, sizeof(key), "%04zu", r);
    row.key = key;
    row.config = configs[r];
    std::vector<SystemId> ids = configs[r].system_ids;
    if (ids.empty())
      for (const auto& [id, s] : by_id) ids.push_back(id);
    std::sort(ids.begin(), ids.end());
    for (SystemId id : ids) {
      CellResult cell;
      cell.system_id = id;
      row.cells.push_back(cell);
      const auto sys = by_id.find(id);
      for (int d = 0; d < configs[r].test_days; ++d) {
        DaySlot slot;
        slot.row = r;
        slot.cell = row.cells.size() - 1;
        slot.start = configs[r].launch(d);
        if (sys == by_id.end()) {
          slot.failure = "unknown system " + std::to_string(id);
        } else {
          slot.system = sys->second;
          auto& f = fits[fit_key(id, slot.start, configs[r])];
          f.config = &configs[r];
          f.system = sys->second;
          f.start = slot.start;
        }
        days.push_back(std::move(slot));
      }
    }
  }
  for (auto& slot : days)
    if (slot.system)
      slot.fit = &fits.at(fit_key(slot.system->system_id, slot.start,
                                  configs[slot.row]));

  std::vector<FitSlot*> fit_list;
  for (auto& [k, f] : fits) fit_list.push_back(&f);
  parallel_for(fit_list.size(), jobs, [&](std::size_t i) {
    FitSlot& f = *fit_list[i];
    try {
      const AssembledSeries series = assemble_for(data, *f.system, *f.config, f.start);
      const TrainingSet train = training_set_for(series, *f.config, f.start);
      FitOptions opt;
      opt.restarts = f.config->restarts;
      opt.seed = fit_seed(seed, f.system->system_id, f.start, *f.config);
      f.fitted = fit_hyperparameters(train, f.config->kernel, opt).spec;
    } catch (const std::exception& e) {
      f.failure = e.what();
    }
  });

  parallel_for(days.size(), jobs, [&](std::size_t i) {
    DaySlot& slot = days[i];
    if (!slot.system) return;
    if (!slot.fit->fitted) {
      slot.failure = slot.fit->failure;
      return;
    }
    try {
      const ExperimentConfig& cfg = configs[slot.row];
      const AssembledSeries series = assemble_for(data, *slot.system, cfg, slot.start);
      const ForecastResult fr = predict_with(series, cfg, slot.start, *slot.fit->fitted);
      slot.sample = {slot.start, fr.mae, fr.mae_daylight};
      slot.ok = true;
    } catch (const std::exception& e) {
      slot.failure = e.what();
    }
  });

  for (const DaySlot& slot : days) {
    CellResult& cell = report.rows[slot.row].cells[slot.cell];
    if (!slot.ok) {
      if (cell.failure.empty()) cell.failure = slot.failure;
      continue;
    }
    cell.days.push_back(slot.sample);
  }
  for (ReportRow& row : report.rows) {
    double sum = 0.0;
    std::size_t ok = 0;
    for (CellResult& cell : row.cells) {
      cell.ok = cell.failure.empty() && !cell.days.empty();
      if (!cell.ok) {
        if (cell.failure.empty()) cell.failure = "no forecast days";
        ++row.failed;
        continue;
      }
      double m = 0.0, md = 0.0;
      std::size_t nd = 0;
      for (const DaySample& d : cell.days) {
        m += d.mae;
        if (std::isfinite(d.mae_daylight)) {
          md += d.mae_daylight;
          ++nd;
        }
      }
      cell.mae = m / static_cast<double>(cell.days.size());
      cell.mae_daylight = nd ? md / static_cast<double>(nd)
                             : std::numeric_limits<double>::quiet_NaN();
      sum += cell.mae;
      ++ok;
    }
    row.average_mae = ok ? sum / static_cast<double>(ok)
                         : std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

std::vector<ExperimentConfig> set_one_grid(const ExperimentConfig& base) {
  const KernelSpec matern = make_kernel_template(KernelFamily::Matern, MaternNu::Half);
  const KernelSpec se = make_kernel_template(KernelFamily::SquaredExponential);
  const KernelSpec rq = make_kernel_template(KernelFamily::RationalQuadratic);

  const auto make = [&](const char* block, int days, int patch,
                        const KernelSpec& kernel) {
    ExperimentConfig c = base;
    c.block = block;
    c.training_days = days;
    c.patch_px = patch;
    c.kernel = kernel;
    c.horizon = Horizon::FortyEightHours;
    c.cloud_mode = CloudMode::Given;
    return c;
  };
  std::vector<ExperimentConfig> grid;
  for (int days : {7, 14, 21, 30})
    grid.push_back(make("training period", days, 2, matern));
  for (int patch : {2, 6, 12})
    grid.push_back(make("sky coverage", 21, patch, matern));
  for (const KernelSpec* k : {&se, &rq, &matern})
    grid.push_back(make("kernel", 21, 2, *k));
  return grid;
}

std::vector<ExperimentConfig> set_two_grid(const ExperimentConfig& base) {
  std::vector<ExperimentConfig> grid;
  for (CloudMode mode : {CloudMode::Given, CloudMode::Persistence}) {
    for (int patch : {6, 12}) {
      ExperimentConfig c = base;
      c.block = mode == CloudMode::Given ? "with cloud coverage"
                                         : "without cloud coverage";
      c.training_days = 21;
      c.patch_px = patch;
      c.kernel = make_kernel_template(KernelFamily::Matern, MaternNu::Half);
      c.horizon = Horizon::FourHours;
      c.cloud_mode = mode;
      grid.push_back(c);
    }
  }
  return grid;
}

}  // namespace pvgp
