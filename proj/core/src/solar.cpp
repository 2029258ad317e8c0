#include "pvgp/solar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pvgp {

using namespace std::chrono;

SolarGeometry solar_geometry(double latitude, double longitude, UtcTime t) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  const auto day = floor<days>(t);
  const year_month_day ymd{day};
  const auto jan1 = sys_days{ymd.year() / January / 1};
  const double year_days = ymd.year().is_leap() ? 366.0 : 365.0;
  const double day_of_year = static_cast<double>((day - jan1).count()) + 1.0;
  const double utc_hours =
      static_cast<double>((t - day).count()) / 3600.0;

  const double g = 2.0 * std::numbers::pi / year_days *
                   (day_of_year - 1.0 + (utc_hours - 12.0) / 24.0);

  const double eot = 229.18 * (0.000075 + 0.001868 * std::cos(g) -
                               0.032077 * std::sin(g) -
                               0.014615 * std::cos(2 * g) -
                               0.040849 * std::sin(2 * g));
  const double decl = 0.006918 - 0.399912 * std::cos(g) + 0.070257 * std::sin(g) -
                      0.006758 * std::cos(2 * g) + 0.000907 * std::sin(2 * g) -
                      0.002697 * std::cos(3 * g) + 0.00148 * std::sin(3 * g);

  const double true_solar_min = utc_hours * 60.0 + eot + 4.0 * longitude;
  const double hour_angle = true_solar_min / 4.0 - 180.0;

  const double phi = latitude * kDeg;
  const double cos_zenith =
      std::sin(phi) * std::sin(decl) +
      std::cos(phi) * std::cos(decl) * std::cos(hour_angle * kDeg);
  const double zenith = std::acos(std::clamp(cos_zenith, -1.0, 1.0));

  return {decl / kDeg, eot, hour_angle, 90.0 - zenith / kDeg};
}

double solar_elevation(double latitude, double longitude, UtcTime t) {
  return solar_geometry(latitude, longitude, t).elevation_deg;
}

}  // namespace pvgp
