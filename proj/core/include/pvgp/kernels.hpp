#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace pvgp {

enum class KernelFamily {
  WhiteNoise,
  SquaredExponential,
  RationalQuadratic,
  Matern,
  Periodic,
};

/// Matérn smoothness. Only the half-integer closed forms are supported.
enum class MaternNu { Half, ThreeHalves, FiveHalves };

double nu_value(MaternNu nu);

bool is_stationary(KernelFamily family);

/// Declarative description of the model covariance: one main kernel plus an
/// additive white-noise term keyed on sample index.
///
/// `alpha` and `nu` describe the stationary radial form. For a Periodic spec
/// that form is `base_family`, applied to the warped time distance (scale
/// `roughness`) and, as a product, to the remaining input dimensions
/// (scales `lengthscales`, one per non-time dimension). Stationary specs carry
/// one lengthscale per input dimension.
struct KernelSpec {
  KernelFamily family = KernelFamily::SquaredExponential;
  double amplitude = 1.0;             // h, watts
  std::vector<double> lengthscales;   // lambda
  double alpha = 1.0;                 // RQ index
  MaternNu nu = MaternNu::Half;
  double roughness = 1.0;             // w (Periodic)
  double period = 288.0;              // T in time-index units (Periodic)
  KernelFamily base_family = KernelFamily::Matern;  // Periodic only
  double noise_variance = 0.0;        // sigma^2, watts^2

  /// The family whose radial form is evaluated: `family` itself, or
  /// `base_family` for Periodic specs.
  KernelFamily radial_family() const {
    return family == KernelFamily::Periodic ? base_family : family;
  }

  /// Throws DataError if any invariant is violated.
  void validate() const;

  /// Also checks the lengthscale count against the input dimensionality.
  void validate_for_dims(std::size_t dims) const;

  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

// Scalar kernel forms. All are pure functions of their arguments.

double eval_white_noise(std::size_t i, std::size_t j, double sigma2);

/// h^2 exp(-r2), with r2 the lengthscale-scaled squared distance.
double eval_se(double r2, double h);

double eval_rq(double r2, double h, double alpha);

/// Half-integer Matérn on the scaled distance r.
double eval_matern(double r, double h, MaternNu nu);

/// Periodic warp of the time distance followed by the base radial form with
/// lengthscale w.
double eval_periodic(double d_time, double h, double w, double period,
                     KernelFamily base_family, double alpha = 1.0,
                     MaternNu nu = MaternNu::Half);

/// Unit-amplitude radial form of a stationary family at scaled squared
/// distance r2.
double radial_correlation(KernelFamily family, double r2, double alpha,
                          MaternNu nu);

/// Squared warped distance of the periodic kernel, already divided by w^2.
double periodic_scaled_distance2(double d_time, double w, double period);

/// Main kernel without the white-noise term.
double eval_main(std::span<const double> xi, std::span<const double> xj,
                 const KernelSpec& spec);

/// Main kernel plus sigma^2 * delta(i, j).
double eval_composite(std::span<const double> xi, std::span<const double> xj,
                      std::size_t i, std::size_t j, const KernelSpec& spec);

// Canonical text form, e.g.
//   periodic(matern12; h=1.5, w=0.8, T=288, lambda=[0.3]) + whitenoise(sigma2=0.01)
// Grammar is documented in README.md.
std::string to_string(const KernelSpec& spec);
KernelSpec parse_kernel_spec(const std::string& text);

std::string family_name(KernelFamily family);

}  // namespace pvgp
