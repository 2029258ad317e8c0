#include <benchmark/benchmark.h>

#include <random>

#include "pvgp/hrv.hpp"

namespace {

void BM_PatchMean(benchmark::State& state) {
  const int patch = static_cast<int>(state.range(0));
  pvgp::RasterGeometry g{400000.0, 300000.0, 1000.0, 64, 64};
  pvgp::HrvFrame frame;
  frame.pixels.resize(64 * 64);
  std::mt19937 rng(5);
  std::uniform_real_distribution<float> v(0.0f, 1023.0f);
  for (float& p : frame.pixels) p = v(rng);
  const pvgp::GeoPoint at{52.0, -1.0, 432500.0, 267500.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(pvgp::hrv_patch_mean(g, frame, at, patch));
}
BENCHMARK(BM_PatchMean)->Arg(2)->Arg(6)->Arg(12);

}  // namespace
