#pragma once

#include "pvgp/projection.hpp"
#include "pvgp/time_index.hpp"

namespace pvgp {

struct SolarGeometry {
  double declination_deg = 0.0;
  double equation_of_time_min = 0.0;
  double hour_angle_deg = 0.0;
  double elevation_deg = 0.0;
};

/// Fourier-series solar position (fractional-year declination and equation of
/// time, then hour angle). Geometric elevation, no refraction; good to a few
/// tenths of a degree.
SolarGeometry solar_geometry(double latitude, double longitude, UtcTime t);

double solar_elevation(double latitude, double longitude, UtcTime t);

inline double solar_elevation(const GeoPoint& point, UtcTime t) {
  return solar_elevation(point.latitude, point.longitude, t);
}

}  // namespace pvgp
