#pragma once

#include <cstdint>
#include <vector>

#include "pvgp/hrv.hpp"
#include "pvgp/pipeline.hpp"

namespace pvgp {

enum class SkyScenario { ClearSky, Overcast, Scattered };

struct SyntheticOptions {
  UtcTime start = make_utc(2021, 6, 1);
  double attenuation = 0.9;          // a: power factor is 1 - a * cloud fraction
  double overcast_fraction = 1.0;
  double clear_hrv = 150.0;          // raw counts for a cloud-free pixel
  double cloud_hrv = 900.0;          // raw counts for full cover
  int margin_px = 16;                // raster margin around the systems
  double pixel_size = 1000.0;
  int block_px = 8;                  // background cloud cell size
  int local_px = 6;                  // window carrying each system's own cloud
  int min_segment_steps = 6;         // scattered: cloud state duration range
  int max_segment_steps = 36;
  double noise_fraction = 0.0;       // daylight power noise sd, share of capacity
};

struct SyntheticBundle {
  UtcTime epoch;
  std::vector<PvSystem> systems;
  PowerSeries power;
  HrvRasterStack hrv;
  /// Cloud fraction driving each system's power, per 5-minute step.
  std::map<SystemId, std::vector<double>> cloud_fraction;
};

/// Clear-sky power is capacity * max(0, sin(solar elevation)). Cloud fraction
/// scales it by (1 - a * fraction) and raises HRV linearly from clear_hrv to
/// cloud_hrv. Scattered skies hold a seeded cloud state for a random number
/// of steps, independently per background cell and per system.
SyntheticBundle generate_synthetic(SkyScenario scenario, int days,
                                   const std::vector<PvSystem>& systems,
                                   std::uint64_t seed,
                                   const SyntheticOptions& options = {});

double clear_sky_power(const PvSystem& system, UtcTime t);

SkyScenario parse_scenario(const std::string& name);
std::string scenario_name(SkyScenario scenario);

}  // namespace pvgp
