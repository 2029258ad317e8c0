#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "pvgp/gp.hpp"
#include "pvgp/kernels.hpp"
#include "pvgp/pipeline.hpp"
#include "pvgp/time_index.hpp"

namespace fixtures {

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("pvgp-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

// Every family the library evaluates, periodic once per base form.
inline std::vector<pvgp::KernelSpec> family_templates(std::size_t dims) {
  using pvgp::KernelFamily;
  using pvgp::MaternNu;
  std::vector<pvgp::KernelSpec> out;
  auto stationary = [&](KernelFamily f, MaternNu nu) {
    pvgp::KernelSpec s;
    s.family = f;
    s.nu = nu;
    s.lengthscales.assign(dims, 1.0);
    out.push_back(s);
  };
  stationary(KernelFamily::SquaredExponential, MaternNu::Half);
  stationary(KernelFamily::RationalQuadratic, MaternNu::Half);
  stationary(KernelFamily::Matern, MaternNu::Half);
  stationary(KernelFamily::Matern, MaternNu::ThreeHalves);
  stationary(KernelFamily::Matern, MaternNu::FiveHalves);
  for (KernelFamily base : {KernelFamily::SquaredExponential, KernelFamily::RationalQuadratic,
                            KernelFamily::Matern}) {
    pvgp::KernelSpec s;
    s.family = KernelFamily::Periodic;
    s.base_family = base;
    s.lengthscales.assign(dims - 1, 1.0);
    out.push_back(s);
  }
  pvgp::KernelSpec noise;
  noise.family = KernelFamily::WhiteNoise;
  out.push_back(noise);
  return out;
}

// Random hyperparameters on a template; noise is a share of h^2 drawn from
// [noise_lo, noise_hi].
inline pvgp::KernelSpec randomize(pvgp::KernelSpec s, std::mt19937_64& rng,
                                  double noise_lo, double noise_hi) {
  s.amplitude = log_uniform(rng, 0.3, 30.0);
  for (double& l : s.lengthscales) l = log_uniform(rng, 0.3, 5.0);
  s.alpha = log_uniform(rng, 0.2, 20.0);
  std::uniform_int_distribution<int> nu(0, 2);
  if (s.family == pvgp::KernelFamily::Periodic) {
    s.roughness = log_uniform(rng, 0.3, 3.0);
    s.period = log_uniform(rng, 2.0, 12.0);
    if (s.base_family == pvgp::KernelFamily::Matern) s.nu = static_cast<pvgp::MaternNu>(nu(rng));
  }
  const double h2 = s.family == pvgp::KernelFamily::WhiteNoise ? 1.0 : s.amplitude * s.amplitude;
  s.noise_variance = noise_hi > 0 ? h2 * log_uniform(rng, noise_lo, noise_hi) : 0.0;
  return s;
}

// n rows; time strictly increasing with random gaps, second column in [0, 1].
inline pvgp::Matrix random_inputs(std::mt19937_64& rng, Eigen::Index n, Eigen::Index dims) {
  std::uniform_real_distribution<double> gap(0.2, 2.0), unit(0.0, 1.0);
  pvgp::Matrix x(n, dims);
  double t = 10.0 * unit(rng);
  for (Eigen::Index i = 0; i < n; ++i) {
    t += gap(rng);
    x(i, 0) = t;
    if (dims > 1) x(i, 1) = unit(rng);
  }
  return x;
}

inline pvgp::Vector random_targets(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g(200.0, 80.0);
  pvgp::Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = g(rng);
  return y;
}

// Filter corpus: two clean systems plus one out of bounds, one with missing
// metadata and one generating half its capacity at local midnight on three
// nights.
struct FilterCorpus {
  std::filesystem::path metadata;
  std::filesystem::path power;
  static constexpr pvgp::SystemId kClean1 = 101;
  static constexpr pvgp::SystemId kClean2 = 102;
  static constexpr pvgp::SystemId kOutOfBounds = 201;
  static constexpr pvgp::SystemId kMissingMetadata = 202;
  static constexpr pvgp::SystemId kOvernight = 203;
};

inline FilterCorpus write_filter_corpus(const std::filesystem::path& dir) {
  FilterCorpus c;
  c.metadata = dir / "metadata.csv";
  c.power = dir / "power.csv";
  write_file(c.metadata,
             "system_id,latitude,longitude,capacity_w\n"
             "101,52.2,0.12,2460\n"
             "102,53.4,-2.2,3870\n"
             "201,52.0,30.0,2820\n"
             "202,51.5,-0.1,\n"
             "203,54.0,-1.5,3960\n");
  std::ofstream p(c.power);
  p << "timestamp_utc,system_id,power_w\n";
  const pvgp::UtcTime day0 = pvgp::make_utc(2021, 6, 1);
  const pvgp::SystemId ids[] = {101, 102, 201, 202, 203};
  const double caps[] = {2460, 3870, 2820, 1000, 3960};
  for (int d = 0; d < 4; ++d)
    for (int k = 0; k < 288; k += 3) {
      const pvgp::UtcTime t = day0 + std::chrono::seconds((d * 288 + k) * 300);
      const double hour = k / 12.0;
      for (int s = 0; s < 5; ++s) {
        double w = 0.0;
        if (hour >= 6 && hour <= 18) w = 0.5 * caps[s] * std::sin((hour - 6) / 12 * 3.14159265);
        // Local solar midnight at 1.5 W falls a few minutes after 00:00 UTC.
        if (ids[s] == 203 && d >= 1 && hour < 0.3) w = 0.5 * caps[s];
        p << pvgp::format_utc(t) << ',' << ids[s] << ',' << w << '\n';
      }
    }
  return c;
}

}  // namespace fixtures
