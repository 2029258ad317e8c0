#include "pvgp/kernels.hpp"

#include <cmath>
#include <numbers>

#include "pvgp/error.hpp"

namespace pvgp {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

double nu_value(MaternNu nu) {
  switch (nu) {
    case MaternNu::Half: return 0.5;
    case MaternNu::ThreeHalves: return 1.5;
    case MaternNu::FiveHalves: return 2.5;
  }
  throw DataError("unsupported Matern smoothness");
}

bool is_stationary(KernelFamily family) {
  return family == KernelFamily::SquaredExponential ||
         family == KernelFamily::RationalQuadratic ||
         family == KernelFamily::Matern;
}

void KernelSpec::validate() const {
  if (!(std::isfinite(noise_variance) && noise_variance >= 0.0))
    throw DataError("kernel noise variance must be finite and >= 0");
  if (family == KernelFamily::WhiteNoise) return;
  if (!positive_finite(amplitude))
    throw DataError("kernel amplitude h must be > 0");
  for (double l : lengthscales)
    if (!positive_finite(l)) throw DataError("kernel lengthscales must be > 0");
  if (family == KernelFamily::Periodic) {
    if (!is_stationary(base_family))
      throw DataError("periodic base kernel must be SE, RQ or Matern");
    if (!positive_finite(roughness))
      throw DataError("periodic roughness w must be > 0");
    if (!positive_finite(period))
      throw DataError("periodic period T must be > 0");
  }
  if (radial_family() == KernelFamily::RationalQuadratic &&
      !positive_finite(alpha))
    throw DataError("RQ index alpha must be > 0");
}

void KernelSpec::validate_for_dims(std::size_t dims) const {
  validate();
  if (dims == 0) throw DataError("inputs must have at least one dimension");
  if (family == KernelFamily::WhiteNoise) return;
  const std::size_t expected =
      family == KernelFamily::Periodic ? dims - 1 : dims;
  if (lengthscales.size() != expected)
    throw DataError("kernel " + to_string(*this) + " has " +
                    std::to_string(lengthscales.size()) +
                    " lengthscales, expected " + std::to_string(expected) +
                    " for " + std::to_string(dims) + "-D inputs");
}

double eval_white_noise(std::size_t i, std::size_t j, double sigma2) {
  return i == j ? sigma2 : 0.0;
}

double eval_se(double r2, double h) { return h * h * std::exp(-r2); }

double eval_rq(double r2, double h, double alpha) {
  // log1p keeps the alpha -> infinity limit accurate.
  return h * h * std::exp(-alpha * std::log1p(r2 / alpha));
}

double eval_matern(double r, double h, MaternNu nu) {
  const double h2 = h * h;
  switch (nu) {
    case MaternNu::Half:
      return h2 * std::exp(-r);
    case MaternNu::ThreeHalves: {
      const double s = std::numbers::sqrt3 * r;
      return h2 * (1.0 + s) * std::exp(-s);
    }
    case MaternNu::FiveHalves: {
      const double s = std::sqrt(5.0) * r;
      return h2 * (1.0 + s + 5.0 * r * r / 3.0) * std::exp(-s);
    }
  }
  throw DataError("unsupported Matern smoothness");
}

double radial_correlation(KernelFamily family, double r2, double alpha,
                          MaternNu nu) {
  switch (family) {
    case KernelFamily::SquaredExponential: return eval_se(r2, 1.0);
    case KernelFamily::RationalQuadratic: return eval_rq(r2, 1.0, alpha);
    case KernelFamily::Matern: return eval_matern(std::sqrt(r2), 1.0, nu);
    default: break;
  }
  throw DataError("radial form requested for non-stationary family " +
                  family_name(family));
}

double periodic_scaled_distance2(double d_time, double w, double period) {
  // u = sqrt(2) |sin(pi d / T)|, so (u / w)^2 = 2 sin^2(pi d / T) / w^2.
  const double s = std::sin(std::numbers::pi * d_time / period);
  return 2.0 * s * s / (w * w);
}

double eval_periodic(double d_time, double h, double w, double period,
                     KernelFamily base_family, double alpha, MaternNu nu) {
  if (!is_stationary(base_family))
    throw DataError("periodic base kernel must be SE, RQ or Matern");
  return h * h *
         radial_correlation(base_family,
                            periodic_scaled_distance2(d_time, w, period),
                            alpha, nu);
}

double eval_main(std::span<const double> xi, std::span<const double> xj,
                 const KernelSpec& spec) {
  if (xi.size() != xj.size())
    throw DataError("kernel inputs have different dimensionality");
  if (spec.family == KernelFamily::WhiteNoise) return 0.0;

  const double h2 = spec.amplitude * spec.amplitude;
  if (spec.family == KernelFamily::Periodic) {
    double k = radial_correlation(
        spec.base_family,
        periodic_scaled_distance2(xi[0] - xj[0], spec.roughness, spec.period),
        spec.alpha, spec.nu);
    if (xi.size() > 1) {
      double r2 = 0.0;
      for (std::size_t d = 1; d < xi.size(); ++d) {
        const double z = (xi[d] - xj[d]) / spec.lengthscales[d - 1];
        r2 += z * z;
      }
      k *= radial_correlation(spec.base_family, r2, spec.alpha, spec.nu);
    }
    return h2 * k;
  }

  double r2 = 0.0;
  for (std::size_t d = 0; d < xi.size(); ++d) {
    const double z = (xi[d] - xj[d]) / spec.lengthscales[d];
    r2 += z * z;
  }
  return h2 * radial_correlation(spec.family, r2, spec.alpha, spec.nu);
}

double eval_composite(std::span<const double> xi, std::span<const double> xj,
                      std::size_t i, std::size_t j, const KernelSpec& spec) {
  return eval_main(xi, xj, spec) +
         eval_white_noise(i, j, spec.noise_variance);
}

std::string family_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::WhiteNoise: return "whitenoise";
    case KernelFamily::SquaredExponential: return "se";
    case KernelFamily::RationalQuadratic: return "rq";
    case KernelFamily::Matern: return "matern";
    case KernelFamily::Periodic: return "periodic";
  }
  return "unknown";
}

}  // namespace pvgp
