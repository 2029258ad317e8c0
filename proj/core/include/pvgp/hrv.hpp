#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "pvgp/projection.hpp"
#include "pvgp/time_index.hpp"

namespace pvgp {

/// Georeferencing of an HRV raster. The origin is the north-west corner:
/// pixel column px grows eastward from origin_easting, row py grows
/// southward from origin_northing.
struct RasterGeometry {
  double origin_easting = 0.0;
  double origin_northing = 0.0;
  double pixel_size = 1000.0;
  std::uint32_t width = 0;
  std::uint32_t height = 0;

  friend bool operator==(const RasterGeometry&, const RasterGeometry&) = default;
};

struct PixelIndex {
  std::int64_t px = 0;
  std::int64_t py = 0;
};

/// Pixel containing a grid coordinate; may lie outside the raster.
PixelIndex pixel_containing(const RasterGeometry& g, double easting,
                            double northing);

struct HrvFrame {
  UtcTime time;
  std::vector<float> pixels;  // row-major, height x width

  float at(const RasterGeometry& g, std::int64_t px, std::int64_t py) const {
    return pixels[static_cast<std::size_t>(py) * g.width +
                  static_cast<std::size_t>(px)];
  }
};

class HrvRasterStack {
 public:
  HrvRasterStack() = default;
  /// Throws DataError unless frames are strictly time-sorted, share the
  /// geometry's dimensions and hold finite non-negative values.
  HrvRasterStack(RasterGeometry geometry, std::vector<HrvFrame> frames);

  const RasterGeometry& geometry() const { return geometry_; }
  const std::vector<HrvFrame>& frames() const { return frames_; }

  /// Frame at exactly `t`, or nullptr.
  const HrvFrame* find(UtcTime t) const;

 private:
  RasterGeometry geometry_;
  std::vector<HrvFrame> frames_;
};

inline constexpr double kDefaultSensorMax = 1023.0;

/// Mean raw value over the s x s window [px - s/2, px + s/2 - 1] (both axes)
/// around the pixel containing `location`, divided by `sensor_max` and
/// clamped to [0, 1]. Throws CoverageError if the window leaves the raster,
/// AlignmentError if no frame exists at `t`.
double hrv_patch_mean(const HrvRasterStack& stack, const GeoPoint& location,
                      int patch_px, UtcTime t,
                      double sensor_max = kDefaultSensorMax);

/// Same, on one frame, without the frame lookup.
double hrv_patch_mean(const RasterGeometry& geometry, const HrvFrame& frame,
                      const GeoPoint& location, int patch_px,
                      double sensor_max = kDefaultSensorMax);

/// Throws CoverageError if the patch around `location` leaves the raster.
void check_patch_coverage(const RasterGeometry& geometry,
                          const GeoPoint& location, int patch_px);

// Binary container: "HRV1", little-endian header (origin_easting f64,
// origin_northing f64, pixel_size f64, width u32, height u32, frame_count
// u32), then per frame epoch seconds i64 and a row-major f32 grid.
void write_hrv_binary(const std::filesystem::path& path,
                      const HrvRasterStack& stack);
HrvRasterStack read_hrv_binary(const std::filesystem::path& path);

/// CSV fallback with header `t,px,py,value` (t as ISO-8601 UTC or epoch
/// seconds). Georeferencing comes from `geometry`; cells not listed are 0.
HrvRasterStack read_hrv_csv(const std::filesystem::path& path,
                            const RasterGeometry& geometry);
void write_hrv_csv(const std::filesystem::path& path,
                   const HrvRasterStack& stack);

}  // namespace pvgp
