#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pvgp/hrv.hpp"
#include "pvgp/projection.hpp"
#include "pvgp/time_index.hpp"

namespace pvgp {

using SystemId = std::int64_t;

struct PvSystem {
  SystemId system_id = 0;
  GeoPoint location;
  double capacity_w = 0.0;
  std::string provenance;  // "file:line"
};

/// A skipped input row.
struct RowDiagnostic {
  std::string source;
  std::size_t line = 0;
  std::optional<SystemId> system_id;
  std::string reason;
};

struct MetadataLoad {
  std::vector<PvSystem> systems;
  std::vector<RowDiagnostic> skipped;
};

/// Reads `system_id,latitude,longitude,capacity_w`. Rows with missing or
/// unparseable fields, out-of-range coordinates, non-positive capacity or a
/// duplicate id are skipped and reported. A missing file or bad header throws
/// DataError.
MetadataLoad load_metadata(const std::filesystem::path& path,
                           const TransverseMercator& projection = TransverseMercator{});

struct PowerReading {
  UtcTime time;
  double power_w = 0.0;
};

/// Per-system readings, time-sorted with unique timestamps.
using PowerSeries = std::map<SystemId, std::vector<PowerReading>>;

struct PowerLoad {
  PowerSeries series;
  std::vector<RowDiagnostic> skipped;
  /// Midnight UTC of the earliest accepted reading; anchors TimeIndex 0.
  std::optional<UtcTime> epoch;
};

/// Reads `timestamp_utc,system_id,power_w`. Rows off the 5-minute grid,
/// malformed rows and duplicate timestamps are skipped and reported.
PowerLoad load_power(const std::filesystem::path& path);

/// Simple polygon in grid metres (closed implicitly).
class Boundary {
 public:
  explicit Boundary(std::vector<GridCoordinate> vertices);
  static Boundary box(double min_easting, double min_northing,
                      double max_easting, double max_northing);
  /// Extent of the British National Grid: 0..700 km E, 0..1300 km N.
  static Boundary united_kingdom();

  bool contains(double easting, double northing) const;
  const std::vector<GridCoordinate>& vertices() const { return vertices_; }

 private:
  std::vector<GridCoordinate> vertices_;
};

enum class RemovalReason {
  MissingMetadata,
  OutOfBounds,
  NoPowerData,
  OvernightGeneration,
};

std::string reason_code(RemovalReason reason);

struct Removal {
  SystemId system_id = 0;
  RemovalReason reason = RemovalReason::MissingMetadata;
  std::string detail;
};

struct FilterOptions {
  Boundary boundary = Boundary::united_kingdom();
  double night_threshold_deg = -5.0;
  double overnight_fraction = 0.01;  // of capacity
  int overnight_nights = 3;
};

struct FilterResult {
  std::vector<PvSystem> kept;
  std::vector<Removal> removed;
};

/// Considers every id present in either `systems` or `power`; each is kept or
/// removed with exactly one reason (checked in the enum's order). Output is
/// sorted by id.
FilterResult filter_systems(const std::vector<PvSystem>& systems,
                            const PowerSeries& power,
                            const FilterOptions& options = {});

/// Nights on which the system reported more than the overnight fraction of
/// capacity while the sun was below the night threshold.
int count_overnight_nights(const PvSystem& system,
                           const std::vector<PowerReading>& readings,
                           const FilterOptions& options);

struct AssembledRow {
  TimeIndex time;
  double hrv_mean = 0.0;  // [0, 1]
  double power_w = 0.0;
};

struct AssembledSeries {
  PvSystem system;
  UtcTime epoch;
  int patch_px = 0;
  TimeIndex window_begin;
  TimeIndex window_end;  // exclusive
  std::vector<AssembledRow> rows;
  std::size_t missing_hrv = 0;    // power reading without a frame
  std::size_t missing_power = 0;  // frame without a power reading
  std::size_t invalid_power = 0;  // reading above 1.1 x capacity, dropped

  std::size_t gaps() const { return missing_hrv + missing_power; }
};

struct AssembleOptions {
  double sensor_max = kDefaultSensorMax;
};

/// Inner join of the system's power readings and HRV patch means over
/// [begin, end). Negative readings are clipped to 0. Throws CoverageError if
/// the patch leaves the raster and EmptyDatasetError if nothing joins.
AssembledSeries assemble(const PvSystem& system, const PowerSeries& power,
                         const HrvRasterStack& stack, int patch_px,
                         TimeIndex begin, TimeIndex end, UtcTime epoch,
                         const AssembleOptions& options = {});

void write_metadata_csv(const std::filesystem::path& path,
                        const std::vector<PvSystem>& systems);
void write_power_csv(const std::filesystem::path& path, const PowerSeries& power);

}  // namespace pvgp
