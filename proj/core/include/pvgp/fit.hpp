#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pvgp/gp.hpp"

namespace pvgp {

/// Maps the free hyperparameters of a kernel template to a vector of logs.
/// Order: h, w (periodic), lengthscales, alpha (RQ), sigma^2. The period T is
/// held at the template value.
class HyperParameterization {
 public:
  HyperParameterization(const KernelSpec& tmpl, const TrainingSet& train);

  Eigen::Index size() const { return static_cast<Eigen::Index>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }

  Vector to_vector(const KernelSpec& spec) const;
  KernelSpec to_spec(const Vector& log_params) const;

  /// Log-uniform initialization box.
  const Vector& init_lower() const { return init_lo_; }
  const Vector& init_upper() const { return init_hi_; }
  /// Box the optimizer projects onto.
  const Vector& hard_lower() const { return hard_lo_; }
  const Vector& hard_upper() const { return hard_hi_; }

  Vector clamp(const Vector& log_params) const;

 private:
  void add(std::string name, double init_lo, double init_hi, double hard_lo,
           double hard_hi);

  KernelSpec template_;
  std::vector<std::string> names_;
  Vector init_lo_, init_hi_, hard_lo_, hard_hi_;
};

struct FitOptions {
  int restarts = 3;
  std::uint64_t seed = 0;
  int max_iterations = 200;
  double tolerance = 1e-6;    // absolute objective improvement
  double fd_step = 1e-3;      // central-difference step in log space
  int jobs = 1;
};

struct RestartOutcome {
  Vector start;
  Vector optimum;
  double log_likelihood = 0.0;  // -inf when the restart failed
  int iterations = 0;
};

struct FitResult {
  KernelSpec spec;
  double log_likelihood = 0.0;
  std::size_t best_restart = 0;
  std::vector<RestartOutcome> restarts;
};

/// Negative log marginal likelihood at log-parameters; +inf where the
/// objective is undefined (conditioning failure, non-finite value).
double fit_objective(const TrainingSet& train, const HyperParameterization& map,
                     const Vector& log_params);

/// Central-difference gradient of fit_objective, as used by the optimizer.
Vector fit_objective_gradient(const TrainingSet& train,
                              const HyperParameterization& map,
                              const Vector& log_params, double step);

FitResult fit_hyperparameters(const TrainingSet& train,
                              const KernelSpec& spec_template,
                              const FitOptions& options);

KernelSpec fit_hyperparameters(const TrainingSet& train,
                               const KernelSpec& spec_template, int restarts,
                               std::uint64_t seed);

}  // namespace pvgp
