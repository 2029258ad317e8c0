#include "pvgp/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "pvgp/error.hpp"
#include "pvgp/solar.hpp"

namespace pvgp {

namespace {

std::vector<double> cloud_timeline(SkyScenario scenario, std::size_t steps,
                                   std::uint64_t seed, std::uint64_t stream,
                                   const SyntheticOptions& o) {
  switch (scenario) {
    case SkyScenario::ClearSky: return std::vector<double>(steps, 0.0);
    case SkyScenario::Overcast:
      return std::vector<double>(steps, o.overcast_fraction);
    case SkyScenario::Scattered: break;
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  std::mt19937_64 rng(seq);
  std::uniform_int_distribution<int> length(o.min_segment_steps,
                                            o.max_segment_steps);
  std::uniform_real_distribution<double> level(0.0, 1.0);
  std::vector<double> out;
  out.reserve(steps);
  while (out.size() < steps) {
    const double v = level(rng);
    const int n = length(rng);
    for (int i = 0; i < n && out.size() < steps; ++i) out.push_back(v);
  }
  return out;
}

}  // namespace

double clear_sky_power(const PvSystem& system, UtcTime t) {
  const double elev = solar_elevation(system.location, t);
  return system.capacity_w *
         std::max(0.0, std::sin(elev * std::numbers::pi / 180.0));
}

SkyScenario parse_scenario(const std::string& name) {
  if (name == "clear-sky") return SkyScenario::ClearSky;
  if (name == "overcast") return SkyScenario::Overcast;
  if (name == "scattered") return SkyScenario::Scattered;
  throw ConfigError("unknown scenario '" + name +
                    "' (expected clear-sky, overcast or scattered)");
}

std::string scenario_name(SkyScenario scenario) {
  switch (scenario) {
    case SkyScenario::ClearSky: return "clear-sky";
    case SkyScenario::Overcast: return "overcast";
    case SkyScenario::Scattered: return "scattered";
  }
  return "unknown";
}

SyntheticBundle generate_synthetic(SkyScenario scenario, int days,
                                   const std::vector<PvSystem>& systems,
                                   std::uint64_t seed,
                                   const SyntheticOptions& o) {
  if (days < 1) throw ConfigError("synthetic generation needs days >= 1");
  if (systems.empty()) throw ConfigError("synthetic generation needs a system");
  if (o.min_segment_steps < 1 || o.max_segment_steps < o.min_segment_steps)
    throw ConfigError("invalid cloud segment length range");

  SyntheticBundle out;
  out.epoch = midnight_of(o.start);
  out.systems = systems;
  const std::int64_t first = timestamp_to_index(o.start, out.epoch).value;
  const auto steps = static_cast<std::size_t>(days * kStepsPerDay);

  // Pixel-aligned raster around every system.
  const double ps = o.pixel_size;
  double min_e = systems.front().location.easting, max_e = min_e;
  double min_n = systems.front().location.northing, max_n = min_n;
  for (const auto& s : systems) {
    min_e = std::min(min_e, s.location.easting);
    max_e = std::max(max_e, s.location.easting);
    min_n = std::min(min_n, s.location.northing);
    max_n = std::max(max_n, s.location.northing);
  }
  RasterGeometry g;
  g.pixel_size = ps;
  g.origin_easting = (std::floor(min_e / ps) - o.margin_px) * ps;
  g.origin_northing = (std::floor(max_n / ps) + 1 + o.margin_px) * ps;
  const double east_edge = (std::floor(max_e / ps) + 1 + o.margin_px) * ps;
  const double south_edge = (std::floor(min_n / ps) - o.margin_px) * ps;
  g.width = static_cast<std::uint32_t>(std::llround((east_edge - g.origin_easting) / ps));
  g.height =
      static_cast<std::uint32_t>(std::llround((g.origin_northing - south_edge) / ps));

  const std::uint32_t bw = (g.width + o.block_px - 1) / o.block_px;
  const std::uint32_t bh = (g.height + o.block_px - 1) / o.block_px;
  std::vector<std::vector<double>> background;
  for (std::uint32_t b = 0; b < bw * bh; ++b)
    background.push_back(cloud_timeline(scenario, steps, seed, 1000000 + b, o));

  struct Local {
    PixelIndex pixel;
    const std::vector<double>* cloud;
  };
  std::vector<Local> locals;
  for (const auto& s : systems) {
    auto& cf = out.cloud_fraction[s.system_id];
    cf = cloud_timeline(scenario, steps, seed,
                        static_cast<std::uint64_t>(s.system_id), o);
    locals.push_back({pixel_containing(g, s.location.easting, s.location.northing), &cf});
  }

  const auto hrv_of = [&](double cf) {
    return static_cast<float>(o.clear_hrv + (o.cloud_hrv - o.clear_hrv) * cf);
  };

  std::vector<HrvFrame> frames(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    HrvFrame& f = frames[k];
    f.time = index_to_timestamp(TimeIndex{first + static_cast<std::int64_t>(k)},
                                out.epoch);
    f.pixels.resize(static_cast<std::size_t>(g.width) * g.height);
    for (std::uint32_t y = 0; y < g.height; ++y)
      for (std::uint32_t x = 0; x < g.width; ++x)
        f.pixels[static_cast<std::size_t>(y) * g.width + x] =
            hrv_of(background[(y / o.block_px) * bw + x / o.block_px][k]);
    const std::int64_t half = o.local_px / 2;
    for (const Local& l : locals) {
      const float v = hrv_of((*l.cloud)[k]);
      for (std::int64_t y = l.pixel.py - half; y < l.pixel.py - half + o.local_px; ++y)
        for (std::int64_t x = l.pixel.px - half; x < l.pixel.px - half + o.local_px; ++x)
          if (x >= 0 && y >= 0 && x < g.width && y < g.height)
            f.pixels[static_cast<std::size_t>(y) * g.width +
                     static_cast<std::size_t>(x)] = v;
    }
  }
  out.hrv = HrvRasterStack(g, std::move(frames));

  for (const auto& s : systems) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(s.system_id), 77u};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> noise(0.0, o.noise_fraction * s.capacity_w);
    const auto& cf = out.cloud_fraction[s.system_id];
    auto& readings = out.power[s.system_id];
    readings.reserve(steps);
    for (std::size_t k = 0; k < steps; ++k) {
      const UtcTime t = index_to_timestamp(
          TimeIndex{first + static_cast<std::int64_t>(k)}, out.epoch);
      double p = clear_sky_power(s, t) * (1.0 - o.attenuation * cf[k]);
      if (p > 0.0 && o.noise_fraction > 0.0) p = std::max(0.0, p + noise(rng));
      readings.push_back({t, p});
    }
  }
  return out;
}

}  // namespace pvgp
