#include <benchmark/benchmark.h>

#include <random>

#include "pvgp/forecast.hpp"
#include "pvgp/gp.hpp"

namespace {

pvgp::Matrix inputs(Eigen::Index n) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> hrv(0.1, 0.9);
  pvgp::Matrix x(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = static_cast<double>(3 * i);
    x(i, 1) = hrv(rng);
  }
  return x;
}

pvgp::KernelSpec periodic_spec() {
  pvgp::KernelSpec s = pvgp::make_kernel_template(pvgp::KernelFamily::Matern);
  s.amplitude = 800.0;
  s.roughness = 0.8;
  s.lengthscales = {0.3};
  s.noise_variance = 400.0;
  return s;
}

pvgp::TrainingSet training(Eigen::Index n) {
  pvgp::Matrix x = inputs(n);
  pvgp::Vector y(n);
  for (Eigen::Index i = 0; i < n; ++i)
    y(i) = 1000.0 * std::max(0.0, std::sin(x(i, 0) * 2.0 * 3.14159265 / 288.0)) *
           (1.0 - 0.8 * x(i, 1));
  return pvgp::TrainingSet(x, y);
}

void BM_Gram(benchmark::State& state) {
  const pvgp::Matrix x = inputs(state.range(0));
  const pvgp::KernelSpec spec = periodic_spec();
  for (auto _ : state) benchmark::DoNotOptimize(pvgp::gram(x, spec));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Gram)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oNSquared);

void BM_Posterior(benchmark::State& state) {
  const pvgp::TrainingSet train = training(state.range(0));
  pvgp::Matrix query = inputs(48);
  query.col(0).array() += 3.0 * static_cast<double>(state.range(0));
  const pvgp::KernelSpec spec = periodic_spec();
  for (auto _ : state) benchmark::DoNotOptimize(pvgp::posterior(train, query, spec));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Posterior)->RangeMultiplier(2)->Range(64, 1024)->Complexity(benchmark::oNCubed);

void BM_LogMarginalLikelihood(benchmark::State& state) {
  const pvgp::TrainingSet train = training(state.range(0));
  const pvgp::KernelSpec spec = periodic_spec();
  for (auto _ : state)
    benchmark::DoNotOptimize(pvgp::log_marginal_likelihood(train, spec));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_LogMarginalLikelihood)->RangeMultiplier(2)->Range(64, 1024);

}  // namespace
