#include "pvgp/projection.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <string>

#include "pvgp/error.hpp"

namespace pvgp {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace

ProjectionParams parse_projection_block(std::string_view text) {
  ProjectionParams p;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("projection block line " + std::to_string(line_no) +
                        ": expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view raw = trim(line.substr(eq + 1));
    double value = 0.0;
    const auto res = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (res.ec != std::errc() || res.ptr != raw.data() + raw.size())
      throw ConfigError("projection block line " + std::to_string(line_no) +
                        ": bad number '" + std::string(raw) + "'");

    if (key == "semi_major") p.semi_major = value;
    else if (key == "semi_minor") p.semi_minor = value;
    else if (key == "scale_factor") p.scale_factor = value;
    else if (key == "origin_latitude") p.origin_latitude = value;
    else if (key == "origin_longitude") p.origin_longitude = value;
    else if (key == "false_easting") p.false_easting = value;
    else if (key == "false_northing") p.false_northing = value;
    else
      throw ConfigError("projection block line " + std::to_string(line_no) +
                        ": unknown key '" + std::string(key) + "'");
  }
  if (!(p.semi_major > 0 && p.semi_minor > 0 && p.semi_minor <= p.semi_major &&
        p.scale_factor > 0))
    throw ConfigError("projection block: inconsistent ellipsoid constants");
  return p;
}

TransverseMercator::TransverseMercator(const ProjectionParams& params)
    : params_(params) {
  const double a = params.semi_major;
  const double b = params.semi_minor;
  e2_ = (a * a - b * b) / (a * a);
  e_ = std::sqrt(e2_);
  const double n = (a - b) / (a + b);
  const double n2 = n * n, n3 = n2 * n, n4 = n3 * n, n5 = n4 * n, n6 = n5 * n;

  const double A = a / (1.0 + n) * (1.0 + n2 / 4.0 + n4 / 64.0 + n6 / 256.0);
  a1_ = params.scale_factor * A;

  alpha_ = {
      n / 2 - 2 * n2 / 3 + 5 * n3 / 16 + 41 * n4 / 180 - 127 * n5 / 288 +
          7891 * n6 / 37800,
      13 * n2 / 48 - 3 * n3 / 5 + 557 * n4 / 1440 + 281 * n5 / 630 -
          1983433 * n6 / 1935360,
      61 * n3 / 240 - 103 * n4 / 140 + 15061 * n5 / 26880 +
          167603 * n6 / 181440,
      49561 * n4 / 161280 - 179 * n5 / 168 + 6601661 * n6 / 7257600,
      34729 * n5 / 80640 - 3418889 * n6 / 1995840,
      212378941 * n6 / 319334400,
  };
  beta_ = {
      n / 2 - 2 * n2 / 3 + 37 * n3 / 96 - n4 / 360 - 81 * n5 / 512 +
          96199 * n6 / 604800,
      n2 / 48 + n3 / 15 - 437 * n4 / 1440 + 46 * n5 / 105 -
          1118711 * n6 / 3870720,
      17 * n3 / 480 - 37 * n4 / 840 - 209 * n5 / 4480 + 5569 * n6 / 90720,
      4397 * n4 / 161280 - 11 * n5 / 504 - 830251 * n6 / 7257600,
      4583 * n5 / 161280 - 108847 * n6 / 3991680,
      20648693 * n6 / 638668800,
  };
  xi0_ = rectifying_xi(params.origin_latitude * kDeg);
}

double TransverseMercator::conformal_tau(double tau) const {
  const double sigma = std::sinh(e_ * std::atanh(e_ * tau / std::hypot(1.0, tau)));
  return tau * std::hypot(1.0, sigma) - sigma * std::hypot(1.0, tau);
}

double TransverseMercator::geographic_tau(double taup) const {
  // Newton iteration on conformal_tau(tau) = taup.
  double tau = taup / (1.0 - e2_);
  for (int i = 0; i < 10; ++i) {
    const double tp = conformal_tau(tau);
    const double dtau = (taup - tp) / std::hypot(1.0, tp) *
                        (1.0 + (1.0 - e2_) * tau * tau) /
                        ((1.0 - e2_) * std::hypot(1.0, tau));
    tau += dtau;
    if (std::abs(dtau) < 1e-15 * std::max(1.0, std::abs(tau))) break;
  }
  return tau;
}

double TransverseMercator::rectifying_xi(double phi) const {
  const double chi = std::atan2(conformal_tau(std::tan(phi)), 1.0);
  double xi = chi;
  for (std::size_t j = 0; j < alpha_.size(); ++j)
    xi += alpha_[j] * std::sin(2.0 * static_cast<double>(j + 1) * chi);
  return xi;
}

GridCoordinate TransverseMercator::forward(double latitude,
                                           double longitude) const {
  if (!(std::abs(latitude) < 90.0) || !(std::abs(longitude) <= 180.0))
    throw ProjectionDomainError("latitude " + std::to_string(latitude) +
                                ", longitude " + std::to_string(longitude) +
                                " is outside the projection domain");
  const double phi = latitude * kDeg;
  double lam = (longitude - params_.origin_longitude) * kDeg;
  lam = std::remainder(lam, 2.0 * std::numbers::pi);

  const double taup = conformal_tau(std::tan(phi));
  const double xip = std::atan2(taup, std::cos(lam));
  const double etap = std::asinh(std::sin(lam) / std::hypot(taup, std::cos(lam)));

  double xi = xip, eta = etap;
  for (std::size_t j = 0; j < alpha_.size(); ++j) {
    const double k = 2.0 * static_cast<double>(j + 1);
    xi += alpha_[j] * std::sin(k * xip) * std::cosh(k * etap);
    eta += alpha_[j] * std::cos(k * xip) * std::sinh(k * etap);
  }
  return {params_.false_easting + a1_ * eta,
          params_.false_northing + a1_ * (xi - xi0_)};
}

GeographicCoordinate TransverseMercator::inverse(double easting,
                                                 double northing) const {
  const double xi = (northing - params_.false_northing) / a1_ + xi0_;
  const double eta = (easting - params_.false_easting) / a1_;

  double xip = xi, etap = eta;
  for (std::size_t j = 0; j < beta_.size(); ++j) {
    const double k = 2.0 * static_cast<double>(j + 1);
    xip -= beta_[j] * std::sin(k * xi) * std::cosh(k * eta);
    etap -= beta_[j] * std::cos(k * xi) * std::sinh(k * eta);
  }
  const double taup =
      std::sin(xip) / std::hypot(std::sinh(etap), std::cos(xip));
  const double lam = std::atan2(std::sinh(etap), std::cos(xip));
  const double phi = std::atan(geographic_tau(taup));

  double lon = params_.origin_longitude + lam / kDeg;
  if (lon > 180.0) lon -= 360.0;
  if (lon < -180.0) lon += 360.0;
  return {phi / kDeg, lon};
}

GeoPoint GeoPoint::project(double latitude, double longitude,
                           const TransverseMercator& tm) {
  if (!(latitude >= -90.0 && latitude <= 90.0))
    throw ProjectionDomainError("latitude " + std::to_string(latitude) +
                                " outside [-90, 90]");
  if (!(longitude >= -180.0 && longitude <= 180.0))
    throw ProjectionDomainError("longitude " + std::to_string(longitude) +
                                " outside [-180, 180]");
  const GridCoordinate g = tm.forward(latitude, longitude);
  return {latitude, longitude, g.easting, g.northing};
}

GridCoordinate latlon_to_tm(double latitude, double longitude,
                            const ProjectionParams& params) {
  return TransverseMercator(params).forward(latitude, longitude);
}

GeographicCoordinate tm_to_latlon(double easting, double northing,
                                  const ProjectionParams& params) {
  return TransverseMercator(params).inverse(easting, northing);
}

}  // namespace pvgp
