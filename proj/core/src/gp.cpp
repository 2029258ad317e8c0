#include "pvgp/gp.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "pvgp/error.hpp"

namespace pvgp {

namespace {

using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::span<const double> row_span(const RowMajor& M, Eigen::Index r) {
  return {M.data() + r * M.cols(), static_cast<std::size_t>(M.cols())};
}

// Maps each row to the first row with identical values.
std::vector<Eigen::Index> representative_rows(const Matrix& X) {
  std::vector<Eigen::Index> rep(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    rep[static_cast<std::size_t>(i)] = i;
    for (Eigen::Index j = 0; j < i; ++j) {
      if (X.row(i) == X.row(j)) {
        rep[static_cast<std::size_t>(i)] = rep[static_cast<std::size_t>(j)];
        break;
      }
    }
  }
  return rep;
}

}  // namespace

TrainingSet::TrainingSet(Matrix inputs, Vector targets)
    : inputs_(std::move(inputs)), targets_(std::move(targets)) {
  if (inputs_.rows() < 1) throw DataError("training set must not be empty");
  if (inputs_.rows() != targets_.size())
    throw DataError("training inputs and targets differ in length");
  if (inputs_.cols() < 1 || inputs_.cols() > 2)
    throw DataError("training inputs must have 1 or 2 columns");
  if (!inputs_.allFinite() || !targets_.allFinite())
    throw DataError("training set contains non-finite values");
  for (Eigen::Index i = 1; i < inputs_.rows(); ++i)
    if (!(inputs_(i, 0) > inputs_(i - 1, 0)))
      throw DataError("training time indices must be strictly increasing");

  const auto n = static_cast<double>(targets_.size());
  mean_ = targets_.mean();
  const double var = (targets_.array() - mean_).square().sum() / n;
  scale_ = var > 0.0 ? std::sqrt(var) : 1.0;
}

Vector TrainingSet::scaled_targets() const {
  return (targets_.array() - mean_) / scale_;
}

Vector PosteriorPrediction::stddev() const {
  return cov.diagonal().cwiseMax(0.0).cwiseSqrt();
}

Matrix build_covariance(const Matrix& A, const Matrix& B, const KernelSpec& spec,
                        bool with_noise) {
  if (A.cols() != B.cols())
    throw DataError("covariance inputs have different dimensionality");
  spec.validate_for_dims(static_cast<std::size_t>(A.cols()));
  if (with_noise && !(A.rows() == B.rows() && A == B))
    throw DataError("noise term requires identical sample lists");

  Matrix K(A.rows(), B.rows());
  const RowMajor a = A;
  const RowMajor b = B;
  const bool symmetric = with_noise;
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    const auto xi = row_span(a, i);
    for (Eigen::Index j = symmetric ? i : 0; j < B.rows(); ++j) {
      const auto xj = row_span(b, j);
      const double k = eval_main(xi, xj, spec);
      K(i, j) = k;
      if (symmetric) K(j, i) = k;
    }
  }
  if (with_noise) K.diagonal().array() += spec.noise_variance;
  return K;
}

Matrix gram(const Matrix& X, const KernelSpec& spec) {
  return build_covariance(X, X, spec, true);
}

JitteredCholesky::JitteredCholesky(const Matrix& K, const KernelSpec& spec) {
  const double mean_diag = K.rows() > 0 ? K.diagonal().mean() : 0.0;
  const double base = mean_diag > 0.0 ? mean_diag : 1.0;
  for (double eps = kInitialJitter; eps <= kMaxJitter * 1.0000001; eps *= 10.0) {
    Matrix Kj = K;
    Kj.diagonal().array() += eps * base;
    llt_.compute(Kj);
    if (llt_.info() == Eigen::Success &&
        llt_.matrixLLT().diagonal().array().isFinite().all() &&
        (llt_.matrixLLT().diagonal().array() > 0.0).all()) {
      jitter_ = eps * base;
      return;
    }
  }
  throw ConditioningError("covariance factorization failed after jitter " +
                          std::to_string(kMaxJitter) + " for kernel " +
                          to_string(spec));
}

double JitteredCholesky::log_determinant() const {
  return 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
}

PosteriorPrediction posterior(const TrainingSet& train, const Matrix& query,
                              const KernelSpec& spec) {
  if (query.cols() != train.dims())
    throw DataError("query dimensionality differs from training inputs");
  const double s2 = train.target_scale() * train.target_scale();

  const Matrix K = gram(train.inputs(), spec) / s2;
  const JitteredCholesky chol(K, spec);
  const Matrix Ks = build_covariance(query, train.inputs(), spec, false) / s2;
  const Matrix Kss = build_covariance(query, query, spec, false) / s2;

  const Vector alpha = chol.solve(train.scaled_targets());
  const Matrix V = chol.llt().matrixL().solve(Ks.transpose());

  PosteriorPrediction out;
  out.mean = (Ks * alpha).array() * train.target_scale() + train.target_mean();
  Matrix C = Kss - V.transpose() * V;
  C = 0.5 * (C + C.transpose());
  out.cov = C * s2;
  const double max_diag = out.cov.rows() ? out.cov.diagonal().maxCoeff() : 0.0;
  for (Eigen::Index i = 0; i < out.cov.rows(); ++i)
    if (out.cov(i, i) < 0.0 && out.cov(i, i) >= -1e-8 * std::max(max_diag, 0.0))
      out.cov(i, i) = 0.0;
  return out;
}

PosteriorPrediction prior(const Matrix& query, const KernelSpec& spec,
                          double mean) {
  PosteriorPrediction out;
  out.mean = Vector::Constant(query.rows(), mean);
  out.cov = build_covariance(query, query, spec, false);
  return out;
}

double log_marginal_likelihood(const TrainingSet& train, const KernelSpec& spec) {
  const double s2 = train.target_scale() * train.target_scale();
  const Matrix K = gram(train.inputs(), spec) / s2;
  const JitteredCholesky chol(K, spec);
  const Vector y = train.scaled_targets();
  const Vector z = chol.llt().matrixL().solve(y);
  const auto n = static_cast<double>(train.size());
  return -0.5 * z.squaredNorm() - 0.5 * chol.log_determinant() -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

Matrix sample_prior(const Matrix& query, const KernelSpec& spec, int count,
                    std::uint64_t seed) {
  if (count < 1) throw DataError("sample_prior needs count >= 1");

  // Without noise, repeated inputs are the same random variable: sample the
  // distinct rows and copy.
  std::vector<Eigen::Index> rep(static_cast<std::size_t>(query.rows()));
  if (spec.noise_variance == 0.0) {
    rep = representative_rows(query);
  } else {
    for (Eigen::Index i = 0; i < query.rows(); ++i)
      rep[static_cast<std::size_t>(i)] = i;
  }
  std::vector<Eigen::Index> unique;
  std::vector<Eigen::Index> slot(rep.size());
  for (std::size_t i = 0; i < rep.size(); ++i) {
    if (rep[i] == static_cast<Eigen::Index>(i)) {
      slot[i] = static_cast<Eigen::Index>(unique.size());
      unique.push_back(static_cast<Eigen::Index>(i));
    } else {
      slot[i] = slot[static_cast<std::size_t>(rep[i])];
    }
  }
  Matrix distinct(static_cast<Eigen::Index>(unique.size()), query.cols());
  for (std::size_t u = 0; u < unique.size(); ++u)
    distinct.row(static_cast<Eigen::Index>(u)) = query.row(unique[u]);

  const JitteredCholesky chol(gram(distinct, spec), spec);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix z(distinct.rows(), count);
  for (Eigen::Index c = 0; c < z.cols(); ++c)
    for (Eigen::Index r = 0; r < z.rows(); ++r) z(r, c) = normal(rng);
  const Matrix draws = chol.llt().matrixL() * z;

  Matrix out(query.rows(), count);
  for (std::size_t i = 0; i < slot.size(); ++i)
    out.row(static_cast<Eigen::Index>(i)) = draws.row(slot[i]);
  return out;
}

}  // namespace pvgp
