#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "pvgp/kernels.hpp"

namespace pvgp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Inputs (one row per sample; column 0 is the time index, column 1 the
/// normalized HRV mean when present) and targets in watts for one system.
class TrainingSet {
 public:
  /// Validates the invariants and computes the centering constants.
  TrainingSet(Matrix inputs, Vector targets);

  const Matrix& inputs() const { return inputs_; }
  const Vector& targets() const { return targets_; }
  Eigen::Index size() const { return inputs_.rows(); }
  Eigen::Index dims() const { return inputs_.cols(); }

  /// Training-target mean, used as the constant prior mean.
  double target_mean() const { return mean_; }
  /// Training-target standard deviation; 1 W when the targets are constant.
  double target_scale() const { return scale_; }

  /// (y - mean) / scale
  Vector scaled_targets() const;

 private:
  Matrix inputs_;
  Vector targets_;
  double mean_ = 0.0;
  double scale_ = 1.0;
};

struct PosteriorPrediction {
  Vector mean;      // m*, watts
  Matrix cov;       // C*, watts^2
  Vector stddev() const;
};

/// |A| x |B| matrix of kernel values. With `with_noise`, A and B must be the
/// same sample list and the white-noise term lands on the diagonal; cross
/// covariances never carry it.
Matrix build_covariance(const Matrix& A, const Matrix& B, const KernelSpec& spec,
                        bool with_noise);

/// Square training Gram including the white-noise diagonal.
Matrix gram(const Matrix& X, const KernelSpec& spec);

/// Cholesky factor of a symmetric matrix with relative diagonal jitter
/// escalated from 1e-10 to 1e-4 (x10 per step).
class JitteredCholesky {
 public:
  /// Throws ConditioningError naming `spec` if every jitter level fails.
  JitteredCholesky(const Matrix& K, const KernelSpec& spec);

  const Eigen::LLT<Matrix>& llt() const { return llt_; }
  double jitter() const { return jitter_; }
  double log_determinant() const;
  Matrix solve(const Matrix& rhs) const { return llt_.solve(rhs); }

 private:
  Eigen::LLT<Matrix> llt_;
  double jitter_ = 0.0;
};

inline constexpr double kInitialJitter = 1e-10;
inline constexpr double kMaxJitter = 1e-4;

PosteriorPrediction posterior(const TrainingSet& train, const Matrix& query,
                              const KernelSpec& spec);

/// Prediction with no observations: constant mean and K(X*, X*).
PosteriorPrediction prior(const Matrix& query, const KernelSpec& spec,
                          double mean = 0.0);

/// Exact log evidence of the centered, scaled targets.
double log_marginal_likelihood(const TrainingSet& train, const KernelSpec& spec);

/// `count` draws (one per column) from N(0, K(X, X)), K without noise unless
/// the spec carries it. Deterministic per seed.
Matrix sample_prior(const Matrix& query, const KernelSpec& spec, int count,
                    std::uint64_t seed);

}  // namespace pvgp
