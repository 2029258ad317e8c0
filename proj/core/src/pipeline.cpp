#include "pvgp/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <unordered_map>

#include "pvgp/csv.hpp"
#include "pvgp/error.hpp"
#include "pvgp/solar.hpp"

namespace pvgp {

MetadataLoad load_metadata(const std::filesystem::path& path,
                           const TransverseMercator& projection) {
  CsvReader reader(path);
  reader.expect_header({"system_id", "latitude", "longitude", "capacity_w"});

  MetadataLoad out;
  std::set<SystemId> seen;
  std::vector<std::string> f;
  while (reader.next(f)) {
    RowDiagnostic diag{reader.source(), reader.line(), std::nullopt, {}};
    const auto skip = [&](std::string reason) {
      diag.reason = std::move(reason);
      out.skipped.push_back(diag);
    };
    if (f.size() != 4) {
      skip("expected 4 fields, found " + std::to_string(f.size()));
      continue;
    }
    long long id = 0;
    if (!parse_int64(f[0], id)) {
      skip("missing or malformed system_id");
      continue;
    }
    diag.system_id = id;
    double lat = 0, lon = 0, cap = 0;
    if (f[1].empty() || f[2].empty()) {
      skip("missing latitude/longitude");
      continue;
    }
    if (f[3].empty()) {
      skip("missing capacity_w");
      continue;
    }
    if (!parse_double(f[1], lat) || !parse_double(f[2], lon) ||
        !parse_double(f[3], cap)) {
      skip("malformed number");
      continue;
    }
    if (!(lat >= -90.0 && lat <= 90.0)) {
      skip("latitude " + f[1] + " outside [-90, 90]");
      continue;
    }
    if (!(lon >= -180.0 && lon <= 180.0)) {
      skip("longitude " + f[2] + " outside [-180, 180]");
      continue;
    }
    if (!(cap > 0.0) || !std::isfinite(cap)) {
      skip("capacity_w must be > 0");
      continue;
    }
    if (!seen.insert(id).second) {
      skip("duplicate system_id");
      continue;
    }
    PvSystem sys;
    sys.system_id = id;
    try {
      sys.location = GeoPoint::project(lat, lon, projection);
    } catch (const ProjectionDomainError& e) {
      skip(e.what());
      continue;
    }
    sys.capacity_w = cap;
    sys.provenance = reader.source() + ":" + std::to_string(reader.line());
    out.systems.push_back(std::move(sys));
  }
  return out;
}

PowerLoad load_power(const std::filesystem::path& path) {
  CsvReader reader(path);
  reader.expect_header({"timestamp_utc", "system_id", "power_w"});

  PowerLoad out;
  std::vector<std::string> f;
  struct Pending {
    PowerReading reading;
    std::size_t line;
  };
  std::map<SystemId, std::vector<Pending>> pending;
  while (reader.next(f)) {
    RowDiagnostic diag{reader.source(), reader.line(), std::nullopt, {}};
    if (f.size() != 3) {
      diag.reason = "expected 3 fields, found " + std::to_string(f.size());
      out.skipped.push_back(diag);
      continue;
    }
    long long id = 0;
    double p = 0.0;
    if (!parse_int64(f[1], id) || !parse_double(f[2], p) || !std::isfinite(p)) {
      diag.reason = "malformed system_id or power_w";
      out.skipped.push_back(diag);
      continue;
    }
    diag.system_id = id;
    UtcTime t;
    try {
      t = parse_utc(f[0]);
    } catch (const DataError& e) {
      diag.reason = e.what();
      out.skipped.push_back(diag);
      continue;
    }
    if (!on_step_boundary(t, midnight_of(t))) {
      diag.reason = "timestamp " + f[0] + " is not on a 5-minute boundary";
      out.skipped.push_back(diag);
      continue;
    }
    pending[id].push_back({{t, p}, reader.line()});
  }

  for (auto& [id, rows] : pending) {
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
      return a.reading.time < b.reading.time;
    });
    auto& series = out.series[id];
    for (const auto& row : rows) {
      if (!series.empty() && series.back().time == row.reading.time) {
        out.skipped.push_back({reader.source(), row.line, id,
                               "duplicate timestamp " +
                                   format_utc(row.reading.time)});
        continue;
      }
      series.push_back(row.reading);
    }
    const UtcTime first = midnight_of(series.front().time);
    if (!out.epoch || first < *out.epoch) out.epoch = first;
  }
  return out;
}

Boundary::Boundary(std::vector<GridCoordinate> vertices)
    : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3)
    throw ConfigError("boundary polygon needs at least 3 vertices");
}

Boundary Boundary::box(double min_easting, double min_northing,
                       double max_easting, double max_northing) {
  return Boundary({{min_easting, min_northing},
                   {max_easting, min_northing},
                   {max_easting, max_northing},
                   {min_easting, max_northing}});
}

Boundary Boundary::united_kingdom() {
  return box(0.0, 0.0, 700000.0, 1300000.0);
}

bool Boundary::contains(double easting, double northing) const {
  if (!std::isfinite(easting) || !std::isfinite(northing)) return false;
  // Even-odd rule; points on an edge count as inside.
  bool inside = false;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = vertices_[i];
    const auto& b = vertices_[j];
    const double cross = (b.easting - a.easting) * (northing - a.northing) -
                         (b.northing - a.northing) * (easting - a.easting);
    if (cross == 0.0 &&
        easting >= std::min(a.easting, b.easting) &&
        easting <= std::max(a.easting, b.easting) &&
        northing >= std::min(a.northing, b.northing) &&
        northing <= std::max(a.northing, b.northing))
      return true;
    if ((a.northing > northing) != (b.northing > northing)) {
      const double x = a.easting + (northing - a.northing) *
                                       (b.easting - a.easting) /
                                       (b.northing - a.northing);
      if (easting < x) inside = !inside;
    }
  }
  return inside;
}

std::string reason_code(RemovalReason reason) {
  switch (reason) {
    case RemovalReason::MissingMetadata: return "missing-metadata";
    case RemovalReason::OutOfBounds: return "out-of-bounds";
    case RemovalReason::NoPowerData: return "no-power-data";
    case RemovalReason::OvernightGeneration: return "overnight-generation";
  }
  return "unknown";
}

int count_overnight_nights(const PvSystem& system,
                           const std::vector<PowerReading>& readings,
                           const FilterOptions& options) {
  const double limit = options.overnight_fraction * system.capacity_w;
  // Nights are keyed by local mean solar date, shifted so each night falls
  // in one key (noon to noon).
  const auto offset = std::chrono::seconds(
      static_cast<std::int64_t>(std::llround(system.location.longitude * 240.0)));
  std::set<std::int64_t> nights;
  for (const PowerReading& r : readings) {
    if (!(r.power_w > limit)) continue;
    if (solar_elevation(system.location, r.time) >= options.night_threshold_deg)
      continue;
    const auto local = r.time + offset - std::chrono::hours(12);
    nights.insert(std::chrono::floor<std::chrono::days>(local)
                      .time_since_epoch()
                      .count());
  }
  return static_cast<int>(nights.size());
}

FilterResult filter_systems(const std::vector<PvSystem>& systems,
                            const PowerSeries& power,
                            const FilterOptions& options) {
  std::map<SystemId, const PvSystem*> meta;
  for (const auto& s : systems) meta.emplace(s.system_id, &s);
  std::set<SystemId> ids;
  for (const auto& s : systems) ids.insert(s.system_id);
  for (const auto& [id, readings] : power) ids.insert(id);

  FilterResult out;
  for (SystemId id : ids) {
    const auto m = meta.find(id);
    if (m == meta.end()) {
      out.removed.push_back({id, RemovalReason::MissingMetadata,
                             "power data present but no usable metadata row"});
      continue;
    }
    const PvSystem& sys = *m->second;
    if (!options.boundary.contains(sys.location.easting,
                                   sys.location.northing)) {
      out.removed.push_back(
          {id, RemovalReason::OutOfBounds,
           "grid position (" + format_double(sys.location.easting) + ", " +
               format_double(sys.location.northing) + ") outside boundary"});
      continue;
    }
    const auto p = power.find(id);
    if (p == power.end() || p->second.empty()) {
      out.removed.push_back({id, RemovalReason::NoPowerData,
                             "no power readings"});
      continue;
    }
    const int nights = count_overnight_nights(sys, p->second, options);
    if (nights >= options.overnight_nights) {
      out.removed.push_back({id, RemovalReason::OvernightGeneration,
                             "generated power on " + std::to_string(nights) +
                                 " nights"});
      continue;
    }
    out.kept.push_back(sys);
  }
  return out;
}

AssembledSeries assemble(const PvSystem& system, const PowerSeries& power,
                         const HrvRasterStack& stack, int patch_px,
                         TimeIndex begin, TimeIndex end, UtcTime epoch,
                         const AssembleOptions& options) {
  check_patch_coverage(stack.geometry(), system.location, patch_px);

  AssembledSeries out;
  out.system = system;
  out.epoch = epoch;
  out.patch_px = patch_px;
  out.window_begin = begin;
  out.window_end = end;

  const UtcTime t0 = index_to_timestamp(begin, epoch);
  const UtcTime t1 = index_to_timestamp(end, epoch);

  std::map<std::int64_t, double> readings;
  if (const auto p = power.find(system.system_id); p != power.end()) {
    for (const PowerReading& r : p->second) {
      if (r.time < t0 || r.time >= t1 || !on_step_boundary(r.time, epoch))
        continue;
      if (r.power_w > 1.1 * system.capacity_w) {
        ++out.invalid_power;
        continue;
      }
      readings.emplace(timestamp_to_index(r.time, epoch).value,
                       std::max(0.0, r.power_w));
    }
  }
  std::map<std::int64_t, const HrvFrame*> frames;
  for (const HrvFrame& f : stack.frames())
    if (f.time >= t0 && f.time < t1 && on_step_boundary(f.time, epoch))
      frames.emplace(timestamp_to_index(f.time, epoch).value, &f);

  auto r = readings.begin();
  auto f = frames.begin();
  while (r != readings.end() || f != frames.end()) {
    if (f == frames.end() || (r != readings.end() && r->first < f->first)) {
      ++out.missing_hrv;
      ++r;
    } else if (r == readings.end() || f->first < r->first) {
      ++out.missing_power;
      ++f;
    } else {
      out.rows.push_back({TimeIndex{r->first},
                          hrv_patch_mean(stack.geometry(), *f->second,
                                         system.location, patch_px,
                                         options.sensor_max),
                          r->second});
      ++r;
      ++f;
    }
  }
  if (out.rows.empty())
    throw EmptyDatasetError("no aligned power/HRV rows for system " +
                            std::to_string(system.system_id) + " in window [" +
                            format_utc(t0) + ", " + format_utc(t1) + ")");
  return out;
}

void write_metadata_csv(const std::filesystem::path& path,
                        const std::vector<PvSystem>& systems) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "system_id,latitude,longitude,capacity_w\n";
  for (const auto& s : systems)
    out << s.system_id << ',' << format_double(s.location.latitude) << ','
        << format_double(s.location.longitude) << ','
        << format_double(s.capacity_w) << '\n';
}

void write_power_csv(const std::filesystem::path& path,
                     const PowerSeries& power) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "timestamp_utc,system_id,power_w\n";
  for (const auto& [id, readings] : power)
    for (const auto& r : readings)
      out << format_utc(r.time) << ',' << id << ',' << format_double(r.power_w)
          << '\n';
}

}  // namespace pvgp
