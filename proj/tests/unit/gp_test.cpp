#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "gp_oracle.hpp"
#include "pvgp/error.hpp"
#include "pvgp/gp.hpp"

namespace {

using pvgp::KernelFamily;
using pvgp::KernelSpec;
using pvgp::Matrix;
using pvgp::Vector;

KernelSpec se(double h, std::vector<double> lambda, double sigma2 = 0.0) {
  KernelSpec s;
  s.family = KernelFamily::SquaredExponential;
  s.amplitude = h;
  s.lengthscales = std::move(lambda);
  s.noise_variance = sigma2;
  return s;
}

double rel_inf(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double denom = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
  return (a - b).cwiseAbs().maxCoeff() / denom;
}

TEST(TrainingSet, ValidatesInvariants) {
  EXPECT_THROW(pvgp::TrainingSet(Matrix(0, 1), Vector(0)), pvgp::DataError);
  EXPECT_THROW(pvgp::TrainingSet(Matrix::Zero(2, 1), Vector::Zero(3)), pvgp::DataError);
  Matrix dup(2, 1);
  dup << 1, 1;
  EXPECT_THROW(pvgp::TrainingSet(dup, Vector::Zero(2)), pvgp::DataError);
  Matrix ok(2, 1);
  ok << 1, 2;
  Vector bad(2);
  bad << 1, NAN;
  EXPECT_THROW(pvgp::TrainingSet(ok, bad), pvgp::DataError);
  EXPECT_THROW(pvgp::TrainingSet(Matrix::Zero(1, 3), Vector::Zero(1)), pvgp::DataError);
}

TEST(TrainingSet, CentersAndScales) {
  Matrix x(4, 1);
  x << 0, 1, 2, 3;
  Vector y(4);
  y << 1, 3, 5, 7;
  const pvgp::TrainingSet t(x, y);
  EXPECT_DOUBLE_EQ(t.target_mean(), 4.0);
  EXPECT_DOUBLE_EQ(t.target_scale(), std::sqrt(5.0));
  EXPECT_NEAR(t.scaled_targets().sum(), 0.0, 1e-14);

  const pvgp::TrainingSet flat(x, Vector::Constant(4, 9.0));
  EXPECT_EQ(flat.target_scale(), 1.0);
}

TEST(BuildCovariance, SinglePointIsAmplitudeSquared) {
  const Matrix x = Matrix::Constant(1, 1, 3.0);
  const Matrix K = pvgp::build_covariance(x, x, se(1.0, {1.0}), true);
  ASSERT_EQ(K.rows(), 1);
  EXPECT_EQ(K(0, 0), 1.0);
}

TEST(BuildCovariance, MatchesElementwiseLoop) {
  std::mt19937_64 rng(5);
  const Matrix x = fixtures::random_inputs(rng, 3, 2);
  const KernelSpec s = se(1.7, {2.0, 0.4}, 0.3);
  const Matrix K = pvgp::build_covariance(x, x, s, true);
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) {
      const Eigen::RowVectorXd a = x.row(i), b = x.row(j);
      EXPECT_DOUBLE_EQ(K(i, j), pvgp::eval_composite(std::span(a.data(), 2),
                                                     std::span(b.data(), 2),
                                                     static_cast<std::size_t>(i),
                                                     static_cast<std::size_t>(j), s));
    }
}

TEST(BuildCovariance, CrossCovarianceCarriesNoNoise) {
  std::mt19937_64 rng(6);
  const Matrix a = fixtures::random_inputs(rng, 2, 1);
  Matrix b(3, 1);
  b << a(0, 0), a(1, 0), 99.0;
  const KernelSpec s = se(1.0, {1.0}, 0.5);
  const Matrix K = pvgp::build_covariance(a, b, s, false);
  ASSERT_EQ(K.rows(), 2);
  ASSERT_EQ(K.cols(), 3);
  EXPECT_DOUBLE_EQ(K(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(K(1, 1), 1.0);
  EXPECT_THROW(pvgp::build_covariance(a, b, s, true), pvgp::DataError);
  EXPECT_THROW(pvgp::build_covariance(a, Matrix::Zero(1, 2), s, false), pvgp::DataError);
}

TEST(Posterior, NoiseFreeSinglePointInterpolates) {
  const Matrix x = Matrix::Constant(1, 1, 4.0);
  const Vector y = Vector::Constant(1, 321.0);
  const KernelSpec s = se(2.0, {1.0});
  const auto p = pvgp::posterior(pvgp::TrainingSet(x, y), x, s);
  EXPECT_NEAR(p.mean(0), 321.0, 1e-9);
  EXPECT_LE(p.cov(0, 0), 1e-8 * 4.0);
  EXPECT_GE(p.cov(0, 0), 0.0);
}

TEST(Prior, MeanAndCovariance) {
  std::mt19937_64 rng(7);
  const Matrix q = fixtures::random_inputs(rng, 4, 1);
  const KernelSpec s = se(3.0, {2.0}, 0.7);
  const auto p = pvgp::prior(q, s, 12.5);
  EXPECT_TRUE((p.mean.array() == 12.5).all());
  EXPECT_EQ(p.cov, pvgp::build_covariance(q, q, s, false));
}

TEST(Posterior, TwoPointsMatchExplicitInverse) {
  std::mt19937_64 rng(8);
  const Matrix x = fixtures::random_inputs(rng, 2, 1);
  const Vector y = fixtures::random_targets(rng, 2);
  const Matrix q = fixtures::random_inputs(rng, 3, 1);
  const KernelSpec s = se(1.3, {1.1}, 0.05);
  const auto p = pvgp::posterior(pvgp::TrainingSet(x, y), q, s);
  const auto o = oracle::posterior(x, y, q, s, pvgp::kInitialJitter);
  EXPECT_LE(rel_inf(p.mean, o.mean), 1e-8);
  EXPECT_LE(rel_inf(p.cov, o.cov), 1e-8);
}

TEST(Posterior, RandomInstancesAcrossFamiliesMatchOracle) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> n_dist(1, 6), m_dist(1, 5);
  for (int dims = 1; dims <= 2; ++dims)
    for (const auto& tmpl : fixtures::family_templates(static_cast<std::size_t>(dims)))
      for (int rep = 0; rep < 5; ++rep) {
        const KernelSpec s = fixtures::randomize(tmpl, rng, 1e-3, 1.0);
        const Matrix x = fixtures::random_inputs(rng, n_dist(rng), dims);
        const Vector y = fixtures::random_targets(rng, x.rows());
        const Matrix q = fixtures::random_inputs(rng, m_dist(rng), dims);
        const auto p = pvgp::posterior(pvgp::TrainingSet(x, y), q, s);
        const auto o = oracle::posterior(x, y, q, s, pvgp::kInitialJitter);
        EXPECT_LE(rel_inf(p.mean, o.mean), 1e-8) << pvgp::to_string(s);
        EXPECT_LE(rel_inf(p.cov, o.cov), 1e-8) << pvgp::to_string(s);
      }
}

TEST(Posterior, CovarianceSymmetricWithClampedDiagonal) {
  std::mt19937_64 rng(10);
  const Matrix x = fixtures::random_inputs(rng, 20, 1);
  const Vector y = fixtures::random_targets(rng, 20);
  KernelSpec s = se(5.0, {3.0});
  const auto p = pvgp::posterior(pvgp::TrainingSet(x, y), x, s);
  EXPECT_LE((p.cov - p.cov.transpose()).cwiseAbs().maxCoeff(),
            1e-8 * p.cov.cwiseAbs().maxCoeff());
  EXPECT_TRUE((p.cov.diagonal().array() >= 0.0).all());
}

TEST(Posterior, RejectsQueryDimensionMismatch) {
  const pvgp::TrainingSet t(Matrix::Constant(1, 1, 0.0), Vector::Constant(1, 1.0));
  EXPECT_THROW(pvgp::posterior(t, Matrix::Zero(1, 2), se(1, {1})), pvgp::DataError);
}

TEST(Jitter, FailsWithConditioningErrorNamingKernel) {
  Matrix K(2, 2);
  K << 1, 2, 2, 1;
  const KernelSpec s = se(1.0, {1.0});
  try {
    pvgp::JitteredCholesky chol(K, s);
    FAIL() << "expected ConditioningError";
  } catch (const pvgp::ConditioningError& e) {
    EXPECT_NE(std::string(e.what()).find(pvgp::to_string(s)), std::string::npos);
  }
}

TEST(Jitter, SingularGramFactorsWithBoundedJitter) {
  // Two identical noise-free rows: singular without jitter.
  Matrix x(2, 1);
  x << 0.0, 1e-9;
  const Matrix K = pvgp::gram(x, se(1.0, {1.0}));
  const pvgp::JitteredCholesky chol(K, se(1.0, {1.0}));
  EXPECT_GE(chol.jitter(), pvgp::kInitialJitter * K.diagonal().mean());
  EXPECT_LE(chol.jitter(), pvgp::kMaxJitter * K.diagonal().mean() * 1.0000001);
}

TEST(LogMarginalLikelihood, SinglePointClosedForm) {
  const pvgp::TrainingSet t(Matrix::Constant(1, 1, 0.0), Vector::Constant(1, 42.0));
  EXPECT_NEAR(pvgp::log_marginal_likelihood(t, se(1.0, {1.0})), -0.91893853320467274, 1e-9);
}

TEST(LogMarginalLikelihood, MatchesExplicitDeterminantAndInverse) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> n_dist(1, 5);
  for (int dims = 1; dims <= 2; ++dims)
    for (const auto& tmpl : fixtures::family_templates(static_cast<std::size_t>(dims)))
      for (int rep = 0; rep < 4; ++rep) {
        const KernelSpec s = fixtures::randomize(tmpl, rng, 1e-3, 1.0);
        const Matrix x = fixtures::random_inputs(rng, n_dist(rng), dims);
        const Vector y = fixtures::random_targets(rng, x.rows());
        const double lib = pvgp::log_marginal_likelihood(pvgp::TrainingSet(x, y), s);
        const double ref = static_cast<double>(
            oracle::log_marginal_likelihood(x, y, s, pvgp::kInitialJitter));
        EXPECT_NEAR(lib, ref, 1e-8 * std::max(1.0, std::abs(ref))) << pvgp::to_string(s);
      }
}

TEST(LogMarginalLikelihood, PureNoisePeaksAtSampleVariance) {
  std::mt19937_64 rng(12);
  const Matrix x = fixtures::random_inputs(rng, 30, 1);
  const Vector y = fixtures::random_targets(rng, 30);
  const pvgp::TrainingSet t(x, y);
  const double var = t.target_scale() * t.target_scale();
  KernelSpec s;
  s.family = KernelFamily::WhiteNoise;
  double previous = -INFINITY;
  for (double f = 0.05; f <= 1.0 + 1e-12; f += 0.05) {
    s.noise_variance = f * var;
    const double v = pvgp::log_marginal_likelihood(t, s);
    EXPECT_GT(v, previous) << f;
    previous = v;
  }
  s.noise_variance = 1.5 * var;
  EXPECT_LT(pvgp::log_marginal_likelihood(t, s), previous);
}

TEST(SamplePrior, EmpiricalCovarianceMatchesKernel) {
  // Points close enough that every entry of K is large next to the
  // Monte-Carlo standard error sqrt((K_ii K_jj + K_ij^2) / N).
  Matrix q(3, 1);
  q << 0.0, 0.4, 0.9;
  const KernelSpec s = se(2.0, {1.0}, 0.1);
  const Matrix draws = pvgp::sample_prior(q, s, 10000, 99);
  const Matrix centered = draws.colwise() - draws.rowwise().mean();
  const Matrix emp = centered * centered.transpose() / 9999.0;
  const Matrix K = pvgp::gram(q, s);
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 3; ++j)
      EXPECT_NEAR(emp(i, j), K(i, j), 0.05 * std::abs(K(i, j))) << i << "," << j;
}

TEST(SamplePrior, DeterministicPerSeed) {
  std::mt19937_64 rng(13);
  const Matrix q = fixtures::random_inputs(rng, 6, 2);
  KernelSpec s = se(1.0, {1.0, 0.5}, 0.01);
  EXPECT_EQ(pvgp::sample_prior(q, s, 4, 5), pvgp::sample_prior(q, s, 4, 5));
  EXPECT_NE(pvgp::sample_prior(q, s, 4, 5), pvgp::sample_prior(q, s, 4, 6));
  EXPECT_THROW(pvgp::sample_prior(q, s, 0, 5), pvgp::DataError);
}

TEST(SamplePrior, IdenticalRowsWithoutNoiseDrawIdenticalValues) {
  Matrix q(3, 1);
  q << 1.0, 1.0, 4.0;
  const Matrix d = pvgp::sample_prior(q, se(1.0, {1.0}), 50, 3);
  EXPECT_EQ(d.row(0), d.row(1));
}

}  // namespace
