#pragma once

#include <array>
#include <string_view>

namespace pvgp {

/// Ellipsoid and grid constants of a transverse Mercator projection. Angles in
/// degrees, distances in metres. Defaults are the British National Grid
/// (Airy 1830 ellipsoid, true origin 49N 2W, false origin -100 km N / 400 km E).
struct ProjectionParams {
  double semi_major = 6377563.396;
  double semi_minor = 6356256.909;
  double scale_factor = 0.9996012717;
  double origin_latitude = 49.0;
  double origin_longitude = -2.0;
  double false_easting = 400000.0;
  double false_northing = -100000.0;

  friend bool operator==(const ProjectionParams&, const ProjectionParams&) = default;
};

/// Parses a `key = value` block (one per line, `#` starts a comment). Keys
/// are the field names above; missing keys keep their defaults and unknown
/// keys are rejected.
ProjectionParams parse_projection_block(std::string_view text);

struct GridCoordinate {
  double easting = 0.0;
  double northing = 0.0;
};

struct GeographicCoordinate {
  double latitude = 0.0;
  double longitude = 0.0;
};

/// Krüger series (sixth order in the third flattening), accurate to a few
/// nanometres within several thousand kilometres of the central meridian.
class TransverseMercator {
 public:
  explicit TransverseMercator(const ProjectionParams& params = {});

  /// Throws ProjectionDomainError at or beyond the poles.
  GridCoordinate forward(double latitude, double longitude) const;
  GeographicCoordinate inverse(double easting, double northing) const;

  const ProjectionParams& params() const { return params_; }

 private:
  double rectifying_xi(double latitude_rad) const;
  double conformal_tau(double tau) const;
  double geographic_tau(double conformal) const;

  ProjectionParams params_;
  double e_ = 0.0;
  double e2_ = 0.0;
  double a1_ = 0.0;  // k0 * A, metres per radian of rectifying latitude
  double xi0_ = 0.0;
  std::array<double, 6> alpha_{};
  std::array<double, 6> beta_{};
};

/// Geographic position with its projected grid coordinates.
struct GeoPoint {
  double latitude = 0.0;
  double longitude = 0.0;
  double easting = 0.0;
  double northing = 0.0;

  /// Validates ranges and fills easting/northing.
  static GeoPoint project(double latitude, double longitude,
                          const TransverseMercator& tm);
};

GridCoordinate latlon_to_tm(double latitude, double longitude,
                            const ProjectionParams& params = {});
GeographicCoordinate tm_to_latlon(double easting, double northing,
                                  const ProjectionParams& params = {});

}  // namespace pvgp
