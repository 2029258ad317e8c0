// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "commands.hpp"
#include "fixtures.hpp"
#include "gp_oracle.hpp"
#include "patch_oracle.hpp"
#include "pvgp/error.hpp"
#include "pvgp/fit.hpp"
#include "pvgp/forecast.hpp"
#include "pvgp/grid.hpp"
#include "pvgp/metrics.hpp"
#include "pvgp/pipeline.hpp"
#include "pvgp/projection.hpp"
#include "pvgp/report.hpp"
#include "pvgp/synthetic.hpp"
#include "redfearn_tm.hpp"
#include "run_config.hpp"

namespace {

namespace fs = std::filesystem;
using pvgp::KernelFamily;
using pvgp::KernelSpec;
using pvgp::Matrix;
using pvgp::Vector;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, const char* fmt = "%.3g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

double rel_inf(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), 1e-300);
}

pvgp::PvSystem site(pvgp::SystemId id, double lat, double lon, double cap) {
  return {id, pvgp::GeoPoint::project(lat, lon, pvgp::TransverseMercator{}), cap, "acceptance"};
}

Outcome gp_exactness() {
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<int> n_dist(1, 6), m_dist(1, 6), dim_dist(1, 2);
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int instances = 0;
  while (instances < 200) {
    const int dims = dim_dist(rng);
    for (const KernelSpec& tmpl : fixtures::family_templates(static_cast<std::size_t>(dims))) {
      if (instances == 200) break;
      const KernelSpec s = fixtures::randomize(tmpl, rng, 1e-3, 1.0);
      const Matrix x = fixtures::random_inputs(rng, n_dist(rng), dims);
      const Vector y = fixtures::random_targets(rng, x.rows());
      const Matrix q = fixtures::random_inputs(rng, m_dist(rng), dims);
      const auto p = pvgp::posterior(pvgp::TrainingSet(x, y), q, s);
      const auto o = oracle::posterior(x, y, q, s, pvgp::kInitialJitter);
      worst = std::max({worst, rel_inf(p.mean, o.mean), rel_inf(p.cov, o.cov)});
      ++instances;
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst <= 1e-8 && secs < 10.0,
          "200 instances, worst relative error " + num(worst) + ", " + num(secs, "%.2f") + " s"};
}

Outcome kernel_psd() {
  std::mt19937_64 rng(1002);
  std::uniform_int_distribution<int> size(2, 20);
  const std::vector<KernelSpec> t = fixtures::family_templates(2);
  // SE, RQ, Matern (each order), periodic (each base), white noise, and
  // every family with a white-noise term.
  const std::vector<std::pair<std::string, std::vector<KernelSpec>>> groups{
      {"se", {t[0]}},           {"rq", {t[1]}},
      {"matern", {t[2], t[3], t[4]}}, {"periodic", {t[5], t[6], t[7]}},
      {"whitenoise", {t[8]}},   {"composite", {t[0], t[1], t[2], t[3], t[4], t[5], t[6], t[7]}}};
  double worst = std::numeric_limits<double>::infinity();
  int grams = 0;
  for (const auto& [name, members] : groups) {
    const bool noisy = name == "whitenoise" || name == "composite";
    for (int k = 0; k < 50; ++k) {
      const KernelSpec& tmpl = members[static_cast<std::size_t>(k) % members.size()];
      const KernelSpec s = fixtures::randomize(tmpl, rng, noisy ? 1e-3 : 0.0, noisy ? 1.0 : 0.0);
      const Matrix K = pvgp::gram(fixtures::random_inputs(rng, size(rng), 2), s);
      const double min_eig = Eigen::SelfAdjointEigenSolver<Matrix>(K).eigenvalues().minCoeff();
      worst = std::min(worst, min_eig / K.trace());
      ++grams;
    }
  }
  return {worst >= -1e-8, std::to_string(grams) + " Gram matrices over 6 groups, min eigenvalue / trace " +
                              num(worst)};
}

Outcome gradient_consistency() {
  std::mt19937_64 rng(1003);
  std::uniform_int_distribution<int> n_dist(10, 25), dim_dist(1, 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  int instances = 0;
  while (instances < 50) {
    const int dims = dim_dist(rng);
    for (const KernelSpec& tmpl : fixtures::family_templates(static_cast<std::size_t>(dims))) {
      if (instances == 50) break;
      const Matrix x = fixtures::random_inputs(rng, n_dist(rng), dims);
      const pvgp::TrainingSet train(x, fixtures::random_targets(rng, x.rows()));
      const pvgp::HyperParameterization map(tmpl, train);
      Vector theta(map.size());
      for (Eigen::Index i = 0; i < theta.size(); ++i)
        theta(i) = map.init_lower()(i) + unit(rng) * (map.init_upper()(i) - map.init_lower()(i));
      const Vector g = pvgp::fit_objective_gradient(train, map, theta, pvgp::FitOptions{}.fd_step);
      const double h = 1e-3;
      for (Eigen::Index i = 0; i < theta.size(); ++i) {
        auto f = [&](double dx) {
          Vector v = theta;
          v(i) += dx;
          return pvgp::fit_objective(train, map, v);
        };
        const double five = (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h);
        worst = std::max(worst, std::abs(g(i) - five) / std::max(1.0, std::abs(five)));
      }
      ++instances;
    }
  }
  return {worst <= 1e-4, "50 instances, worst relative disagreement " + num(worst)};
}

Outcome hyperparameter_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  Matrix x(40, 1);
  for (int i = 0; i < 40; ++i) x(i, 0) = i;
  KernelSpec truth;
  truth.family = KernelFamily::SquaredExponential;
  truth.amplitude = 2.0;
  truth.lengthscales = {4.0};
  truth.noise_variance = 0.04;
  KernelSpec tmpl = truth;
  tmpl.lengthscales = {1.0};
  int recovered = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const pvgp::TrainingSet t(x, pvgp::sample_prior(x, truth, 1, seed).col(0));
    const pvgp::HyperParameterization map(truth, t);
    const KernelSpec fit = pvgp::fit_hyperparameters(t, tmpl, 8, seed);
    if ((map.to_vector(fit) - map.to_vector(truth)).cwiseAbs().maxCoeff() < 0.5) ++recovered;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {recovered >= 7 && secs < 60.0,
          std::to_string(recovered) + "/10 seeds within 0.5 in every log-hyperparameter, " +
              num(secs, "%.2f") + " s"};
}

Outcome mae_fidelity() {
  const std::vector<double> actual{0.0, 250.0, 1200.0, 2460.0, 75.5};
  std::vector<double> off;
  for (std::size_t i = 0; i < actual.size(); ++i) off.push_back(actual[i] + (i % 2 ? 100.0 : -100.0));
  bool ok = pvgp::mae(actual, off) == 100.0;
  ok = ok && pvgp::mae(actual, actual) == 0.0;
  ok = ok && pvgp::mae(std::vector<double>{100, 200}, std::vector<double>{150, 250}) == 50.0;
  ok = ok && pvgp::mae(actual, off) == pvgp::mae(off, actual);
  bool threw = false;
  try {
    pvgp::mae(std::vector<double>{1.0}, std::vector<double>{});
  } catch (const pvgp::DataError&) {
    threw = true;
  }
  return {ok && threw, "off-by-100 W gives " + num(pvgp::mae(actual, off), "%.17g") +
                           "; identity, hand example, symmetry and length check"};
}

Outcome projection() {
  const pvgp::TransverseMercator tm;
  std::mt19937_64 rng(1006);
  std::uniform_real_distribution<double> lat(49.8, 60.9), lon(-8.2, 1.8);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double p = lat(rng), l = lon(rng);
    const pvgp::GridCoordinate g = tm.forward(p, l);
    const pvgp::GeographicCoordinate b = tm.inverse(g.easting, g.northing);
    worst = std::max({worst, std::abs(b.latitude - p), std::abs(b.longitude - l)});
  }
  const pvgp::GridCoordinate ex =
      tm.forward(oracle::dms(52, 39, 27.2531), oracle::dms(1, 43, 4.5177));
  const double de = ex.easting - 651409.903, dn = ex.northing - 313177.270;
  return {worst <= 1e-8 && std::abs(de) <= 0.01 && std::abs(dn) <= 0.01,
          "round trip worst " + num(worst) + " deg; worked example off by (" + num(de, "%.4f") +
              ", " + num(dn, "%.4f") + ") m"};
}

Outcome pipeline_filters() {
  fixtures::TempDir dir;
  const fixtures::FilterCorpus c = fixtures::write_filter_corpus(dir.path());
  const pvgp::FilterResult r = pvgp::filter_systems(pvgp::load_metadata(c.metadata).systems,
                                                    pvgp::load_power(c.power).series);
  std::string removed;
  bool ok = r.removed.size() == 3 && r.kept.size() == 2;
  for (const pvgp::Removal& x : r.removed) {
    removed += (removed.empty() ? "" : ", ") + std::to_string(x.system_id) + " " +
               pvgp::reason_code(x.reason);
    const pvgp::RemovalReason want =
        x.system_id == c.kOutOfBounds       ? pvgp::RemovalReason::OutOfBounds
        : x.system_id == c.kMissingMetadata ? pvgp::RemovalReason::MissingMetadata
        : x.system_id == c.kOvernight       ? pvgp::RemovalReason::OvernightGeneration
                                            : pvgp::RemovalReason::NoPowerData;
    ok = ok && x.reason == want && x.system_id != c.kClean1 && x.system_id != c.kClean2;
  }
  return {ok, "removed " + removed + "; kept " + std::to_string(r.kept.size())};
}

Outcome patch_averaging() {
  std::mt19937_64 rng(1008);
  const int sizes[] = {2, 6, 12};
  int exact = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<std::uint32_t> dim(14, 48);
    const pvgp::RasterGeometry g{2.0e5, 6.0e5, 1000.0, dim(rng), dim(rng)};
    std::uniform_int_distribution<int> v(0, 1023);
    pvgp::HrvFrame f{pvgp::make_utc(2021, 6, 1),
                     std::vector<float>(std::size_t{g.width} * g.height)};
    for (float& p : f.pixels) p = static_cast<float>(v(rng));
    const int s = sizes[trial % 3];
    std::uniform_real_distribution<double> ue(g.origin_easting + (s / 2) * g.pixel_size,
                                              g.origin_easting + (g.width - s + s / 2) * g.pixel_size);
    std::uniform_real_distribution<double> un(g.origin_northing - (g.height - s + s / 2) * g.pixel_size,
                                              g.origin_northing - (s / 2) * g.pixel_size);
    pvgp::GeoPoint p;
    p.easting = ue(rng);
    p.northing = un(rng);
    const double want = oracle::patch_mean(f.pixels, static_cast<int>(g.width),
                                           static_cast<int>(g.height), g.origin_easting,
                                           g.origin_northing, g.pixel_size, p.easting,
                                           p.northing, s, 1023.0);
    try {
      if (want >= 0.0 && pvgp::hrv_patch_mean(g, f, p, s) == want) ++exact;
    } catch (const pvgp::CoverageError&) {
    }
  }
  return {exact == 100, std::to_string(exact) + "/100 triples bit-identical to the double loop"};
}

Outcome directional_replication() {
  const auto t0 = std::chrono::steady_clock::now();
  const int training_days = 21, test_days = 10;
  const pvgp::SyntheticBundle b =
      pvgp::generate_synthetic(pvgp::SkyScenario::Scattered, training_days + test_days + 1,
                               {site(709, 52.2, 0.12, 2460)}, 2024);
  const pvgp::GridDataset data{b.epoch, b.systems, b.power, b.hrv, {}};
  pvgp::ExperimentConfig base;
  base.forecast_start = pvgp::TimeIndex{training_days * pvgp::kStepsPerDay + 10 * 12};
  base.test_days = test_days;
  base.training_stride = 13;
  base.restarts = 2;
  std::vector<pvgp::ExperimentConfig> grid;
  for (const pvgp::ExperimentConfig& c : pvgp::set_two_grid(base))
    if (c.patch_px == 6) grid.push_back(c);
  const pvgp::ExperimentReport r = pvgp::run_grid(grid, data, 2024);
  const double given = r.rows[0].average_mae, persistence = r.rows[1].average_mae;
  std::size_t days = 0;
  for (const auto& row : r.rows)
    for (const auto& cell : row.cells) days = std::max(days, cell.days.size());
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = r.rows.size() == 2 && r.rows[0].failed == 0 && r.rows[1].failed == 0 &&
                  days >= 10 && given < persistence && secs < 600.0;
  return {ok, std::to_string(days) + " scattered days at 6x6: given " + num(given, "%.2f") +
                  " W < persistence " + num(persistence, "%.2f") + " W, " + num(secs, "%.1f") +
                  " s"};
}

Outcome protocol_shape() {
  const int days = 32;
  const pvgp::SyntheticBundle b = pvgp::generate_synthetic(
      pvgp::SkyScenario::Scattered, days,
      {site(709, 52.2, 0.12, 2460), site(1556, 53.4, -2.2, 3870),
       site(1627, 51.5, -0.9, 2820), site(1872, 54.0, -1.5, 3960)},
      7);
  pvgp::ExperimentConfig base;
  base.forecast_start = pvgp::TimeIndex{30 * pvgp::kStepsPerDay};
  base.training_stride = 96;
  base.restarts = 1;
  const std::vector<pvgp::ExperimentConfig> grid = pvgp::set_one_grid(base);
  const pvgp::ExperimentReport r =
      pvgp::run_grid(grid, {b.epoch, b.systems, b.power, b.hrv, {}}, 7);

  // Training period sweep, then sky coverage, then kernel.
  const std::vector<std::vector<std::string>> layout{
      {"1 week", "2x2", "Matern12"},  {"2 weeks", "2x2", "Matern12"},
      {"3 weeks", "2x2", "Matern12"}, {"1 month", "2x2", "Matern12"},
      {"3 weeks", "2x2", "Matern12"}, {"3 weeks", "6x6", "Matern12"},
      {"3 weeks", "12x12", "Matern12"}, {"3 weeks", "2x2", "Squared Exponential"},
      {"3 weeks", "2x2", "Rational Quadratic"}, {"3 weeks", "2x2", "Matern12"}};
  std::istringstream table(pvgp::render_config_table(r));
  std::string header, rule, line;
  std::getline(table, header);
  std::getline(table, rule);
  bool layout_ok = header.find("Training Period") != std::string::npos &&
                   header.find("System 1872") != std::string::npos &&
                   header.find("Average") != std::string::npos;
  int lines = 0;
  while (std::getline(table, line)) {
    if (line.empty()) continue;
    if (lines < 10) {
      const auto& want = layout[static_cast<std::size_t>(lines)];
      std::size_t pos = 0;
      for (const std::string& cell : want) {
        pos = line.find(cell, pos);
        layout_ok = layout_ok && pos != std::string::npos;
        if (pos == std::string::npos) break;
        pos += cell.size();
      }
    }
    ++lines;
  }
  layout_ok = layout_ok && lines == 10 && r.rows.size() == 10;
  std::size_t failed = 0;
  for (const auto& row : r.rows) failed += row.failed;

  pvgp::ExperimentConfig q;
  q.training_days = 1;
  q.patch_px = 2;
  const pvgp::AssembledSeries s =
      pvgp::assemble(b.systems[0], b.power, b.hrv, 2, {0}, {4 * pvgp::kStepsPerDay}, b.epoch);
  q.horizon = pvgp::Horizon::FortyEightHours;
  const auto long_rows = pvgp::forecast_query(s, q, {pvgp::kStepsPerDay}).rows();
  q.horizon = pvgp::Horizon::FourHours;
  const auto short_rows = pvgp::forecast_query(s, q, {pvgp::kStepsPerDay}).rows();

  return {layout_ok && failed == 0 && long_rows == 576 && short_rows == 48,
          std::to_string(r.rows.size()) + " rows in set-one order, " + std::to_string(failed) +
              " failed cells; 48 h -> " + std::to_string(long_rows) + " steps, 4 h -> " +
              std::to_string(short_rows)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  fixtures::TempDir dir;
  const pvgp::cli::Json doc = pvgp::cli::Json::parse(R"({
    "seed": 99,
    "synth": {"scenario": "scattered", "days": 9,
              "systems": [{"system_id": 709, "latitude": 52.2, "longitude": 0.12, "capacity_w": 2460},
                          {"system_id": 1627, "latitude": 51.5, "longitude": -0.9, "capacity_w": 2820}]},
    "experiment": {"source": "synthetic", "grid": "set-two", "test_days": 2,
                   "training_stride": 24, "restarts": 2,
                   "forecast_start": "2021-06-08T10:00:00Z"}
  })");
  const std::vector<std::string> files{"report.csv", "day_samples.csv", "report.txt",
                                       "boxplot_testing_day.csv", "boxplot_system.csv"};
  pvgp::cli::RunConfig cfg = pvgp::cli::parse_run_config(doc, dir.path());
  std::ostringstream sink;
  cfg.output_dir = (dir / "first").string();
  pvgp::cli::cmd_experiment(cfg, sink);
  cfg.output_dir = (dir / "second").string();
  pvgp::cli::cmd_experiment(cfg, sink);
  bool ok = true;
  std::size_t bytes = 0;
  for (const std::string& f : files) {
    const std::string a = slurp(dir / "first" / f), b = slurp(dir / "second" / f);
    ok = ok && !a.empty() && a == b;
    bytes += a.size();
  }
  return {ok, std::to_string(files.size()) + " report files, " + std::to_string(bytes) +
                  " bytes, identical across two runs"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"GP exactness against explicit-inverse oracle", gp_exactness},
      {"Kernel PSD suite", kernel_psd},
      {"Objective gradient consistency", gradient_consistency},
      {"Hyperparameter recovery", hyperparameter_recovery},
      {"MAE fidelity", mae_fidelity},
      {"Projection", projection},
      {"Pipeline filters", pipeline_filters},
      {"Patch averaging", patch_averaging},
      {"Given vs persistence cloud coverage", directional_replication},
      {"Protocol shape", protocol_shape},
      {"Determinism", determinism}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures),
              criteria.size());
  return failures == 0 ? 0 : 1;
}
