#include "pvgp/forecast.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pvgp/error.hpp"
#include "pvgp/metrics.hpp"
#include "pvgp/solar.hpp"

namespace pvgp {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<AssembledRow>::const_iterator row_at_or_after(
    const AssembledSeries& s, std::int64_t t) {
  return std::lower_bound(
      s.rows.begin(), s.rows.end(), t,
      [](const AssembledRow& r, std::int64_t v) { return r.time.value < v; });
}

std::string where(const AssembledSeries& s, TimeIndex start) {
  return "system " + std::to_string(s.system.system_id) + " launch " +
         format_utc(index_to_timestamp(start, s.epoch));
}

}  // namespace

std::string horizon_label(Horizon h) {
  return h == Horizon::FourHours ? "4h" : "48h";
}

std::string cloud_mode_label(CloudMode m) {
  return m == CloudMode::Given ? "given" : "persistence";
}

KernelSpec make_kernel_template(KernelFamily radial, MaternNu nu, bool periodic,
                                int dims, double period) {
  if (!is_stationary(radial))
    throw ConfigError("kernel template needs a stationary radial family");
  KernelSpec spec;
  spec.nu = nu;
  spec.alpha = 1.0;
  spec.amplitude = 1.0;
  spec.noise_variance = 0.01;
  if (periodic) {
    spec.family = KernelFamily::Periodic;
    spec.base_family = radial;
    spec.roughness = 1.0;
    spec.period = period;
    spec.lengthscales.assign(static_cast<std::size_t>(dims - 1), 1.0);
  } else {
    spec.family = radial;
    spec.lengthscales.assign(static_cast<std::size_t>(dims), 1.0);
  }
  return spec;
}

std::string kernel_label(const KernelSpec& spec) {
  std::string name;
  switch (spec.radial_family()) {
    case KernelFamily::SquaredExponential: name = "Squared Exponential"; break;
    case KernelFamily::RationalQuadratic: name = "Rational Quadratic"; break;
    case KernelFamily::Matern:
      name = spec.nu == MaternNu::Half          ? "Matern12"
             : spec.nu == MaternNu::ThreeHalves ? "Matern32"
                                                : "Matern52";
      break;
    default: name = "White Noise"; break;
  }
  if (spec.family != KernelFamily::Periodic &&
      spec.family != KernelFamily::WhiteNoise)
    name += " (plain)";
  return name;
}

void ExperimentConfig::validate() const {
  if (training_days < 1) throw ConfigError("training_days must be >= 1");
  if (patch_px < 1) throw ConfigError("patch_px must be >= 1");
  if (test_days < 1) throw ConfigError("test_days must be >= 1");
  if (training_stride < 1) throw ConfigError("training_stride must be >= 1");
  if (restarts < 1) throw ConfigError("restarts must be >= 1");
  if (horizon == Horizon::FortyEightHours && cloud_mode != CloudMode::Given)
    throw ConfigError("the 48 h protocol uses given cloud coverage only");
  kernel.validate_for_dims(use_hrv ? 2 : 1);
}

TrainingSet training_set_for(const AssembledSeries& series,
                             const ExperimentConfig& cfg, TimeIndex start) {
  const std::int64_t begin = start.value - cfg.training_days * kStepsPerDay;
  if (series.window_begin.value > begin || series.window_end.value < start.value)
    throw CoverageError("series does not cover the " +
                        std::to_string(cfg.training_days) +
                        "-day training window for " + where(series, start));
  const auto first = row_at_or_after(series, begin);
  const auto last = row_at_or_after(series, start.value);
  const auto count = static_cast<std::size_t>(last - first);
  if (count == 0)
    throw CoverageError("no training rows for " + where(series, start));

  std::vector<std::size_t> picked;
  for (std::size_t k = count; k-- > 0;)
    if ((count - 1 - k) % static_cast<std::size_t>(cfg.training_stride) == 0)
      picked.push_back(k);
  std::reverse(picked.begin(), picked.end());

  const int dims = cfg.use_hrv ? 2 : 1;
  Matrix X(static_cast<Eigen::Index>(picked.size()), dims);
  Vector y(static_cast<Eigen::Index>(picked.size()));
  for (std::size_t i = 0; i < picked.size(); ++i) {
    const AssembledRow& r = *(first + static_cast<std::ptrdiff_t>(picked[i]));
    const auto row = static_cast<Eigen::Index>(i);
    X(row, 0) = static_cast<double>(r.time.value);
    if (dims == 2) X(row, 1) = r.hrv_mean;
    y(row) = r.power_w;
  }
  return TrainingSet(std::move(X), std::move(y));
}

Matrix forecast_query(const AssembledSeries& series, const ExperimentConfig& cfg,
                      TimeIndex start) {
  const int steps = horizon_steps(cfg.horizon);
  const int dims = cfg.use_hrv ? 2 : 1;
  Matrix Q(steps, dims);

  double persisted = 0.0;
  if (cfg.cloud_mode == CloudMode::Persistence) {
    const auto it = row_at_or_after(series, start.value);
    const std::int64_t begin = start.value - cfg.training_days * kStepsPerDay;
    if (it == series.rows.begin() || std::prev(it)->time.value < begin)
      throw CoverageError("no observed cloud coverage before " +
                          where(series, start));
    persisted = std::prev(it)->hrv_mean;
  }

  auto it = row_at_or_after(series, start.value);
  for (int k = 0; k < steps; ++k, ++it) {
    const std::int64_t t = start.value + k;
    if (it == series.rows.end() || it->time.value != t)
      throw CoverageError("series is missing step " + std::to_string(t) +
                          " of the " + horizon_label(cfg.horizon) +
                          " horizon for " + where(series, start));
    Q(k, 0) = static_cast<double>(t);
    if (dims == 2)
      Q(k, 1) = cfg.cloud_mode == CloudMode::Given ? it->hrv_mean : persisted;
  }
  return Q;
}

std::uint64_t fit_seed(std::uint64_t base, SystemId system, TimeIndex start,
                       const ExperimentConfig& cfg) {
  std::uint64_t h = splitmix(base);
  for (std::uint64_t part :
       {static_cast<std::uint64_t>(system), static_cast<std::uint64_t>(start.value),
        static_cast<std::uint64_t>(cfg.training_days),
        static_cast<std::uint64_t>(cfg.patch_px),
        static_cast<std::uint64_t>(cfg.training_stride),
        static_cast<std::uint64_t>(cfg.restarts),
        static_cast<std::uint64_t>(cfg.use_hrv), fnv1a(to_string(cfg.kernel))})
    h = splitmix(h ^ part);
  return h;
}

ForecastResult predict_with(const AssembledSeries& series,
                            const ExperimentConfig& cfg, TimeIndex start,
                            const KernelSpec& fitted) {
  const TrainingSet train = training_set_for(series, cfg, start);
  ForecastResult out;
  out.start = start;
  out.query = forecast_query(series, cfg, start);
  out.fitted = fitted;
  out.training_points = train.size();
  out.prediction = posterior(train, out.query, fitted);

  const double cap = series.system.capacity_w;
  out.clamped_mean = out.prediction.mean.cwiseMax(0.0).cwiseMin(cap);
  const auto steps = out.query.rows();
  out.truth.resize(steps);
  auto it = row_at_or_after(series, start.value);
  for (Eigen::Index k = 0; k < steps; ++k, ++it) out.truth(k) = it->power_w;

  out.mae = mae({out.truth.data(), static_cast<std::size_t>(steps)},
                {out.clamped_mean.data(), static_cast<std::size_t>(steps)});

  std::vector<double> day_truth, day_pred;
  for (Eigen::Index k = 0; k < steps; ++k) {
    const UtcTime t = index_to_timestamp(
        TimeIndex{start.value + static_cast<std::int64_t>(k)}, series.epoch);
    if (solar_elevation(series.system.location, t) > 0.0) {
      day_truth.push_back(out.truth(k));
      day_pred.push_back(out.clamped_mean(k));
    }
  }
  out.mae_daylight = day_truth.empty()
                         ? std::numeric_limits<double>::quiet_NaN()
                         : mae(day_truth, day_pred);
  return out;
}

ForecastResult run_forecast(const AssembledSeries& series,
                            const ExperimentConfig& cfg, TimeIndex start,
                            std::uint64_t seed, int jobs) {
  cfg.validate();
  const TrainingSet train = training_set_for(series, cfg, start);
  FitOptions opt;
  opt.restarts = cfg.restarts;
  opt.seed = seed;
  opt.jobs = jobs;
  const KernelSpec fitted = fit_hyperparameters(train, cfg.kernel, opt).spec;
  return predict_with(series, cfg, start, fitted);
}

ForecastResult forecast_48h(const AssembledSeries& series,
                            const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.horizon != Horizon::FortyEightHours)
    throw ConfigError("forecast_48h needs the 48 h horizon");
  return run_forecast(series, cfg, cfg.forecast_start,
                      fit_seed(seed, series.system.system_id,
                               cfg.forecast_start, cfg));
}

ForecastResult forecast_4h(const AssembledSeries& series,
                           const ExperimentConfig& cfg, std::uint64_t seed) {
  if (cfg.horizon != Horizon::FourHours)
    throw ConfigError("forecast_4h needs the 4 h horizon");
  return run_forecast(series, cfg, cfg.forecast_start,
                      fit_seed(seed, series.system.system_id,
                               cfg.forecast_start, cfg));
}

}  // namespace pvgp
