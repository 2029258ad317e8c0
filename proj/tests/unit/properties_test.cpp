#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "pvgp/gp.hpp"
#include "pvgp/kernels.hpp"

namespace {

using pvgp::KernelFamily;
using pvgp::KernelSpec;
using pvgp::Matrix;
using pvgp::Vector;

double row_eval(const Matrix& X, Eigen::Index i, Eigen::Index j, const KernelSpec& s) {
  const Vector a = X.row(i).transpose(), b = X.row(j).transpose();
  return pvgp::eval_composite(std::span<const double>(a.data(), a.size()),
                              std::span<const double>(b.data(), b.size()),
                              static_cast<std::size_t>(i), static_cast<std::size_t>(j), s);
}

TEST(KernelProperties, GramIsPositiveSemiDefinite) {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> size(2, 20);
  for (const KernelSpec& tmpl : fixtures::family_templates(2)) {
    for (int k = 0; k < 50; ++k) {
      const bool noise_only = tmpl.family == KernelFamily::WhiteNoise;
      const KernelSpec s = fixtures::randomize(tmpl, rng, noise_only ? 0.01 : 0.0,
                                               noise_only ? 1.0 : 0.0);
      const Matrix X = fixtures::random_inputs(rng, size(rng), 2);
      const Matrix K = pvgp::gram(X, s);
      const double min_eig = Eigen::SelfAdjointEigenSolver<Matrix>(K).eigenvalues().minCoeff();
      EXPECT_GE(min_eig, -1e-8 * K.trace()) << pvgp::to_string(s);
    }
  }
}

TEST(KernelProperties, SymmetricAndBounded) {
  std::mt19937_64 rng(102);
  for (const KernelSpec& tmpl : fixtures::family_templates(2)) {
    const KernelSpec s = fixtures::randomize(tmpl, rng, 0.01, 0.5);
    const Matrix X = fixtures::random_inputs(rng, 15, 2);
    for (Eigen::Index i = 0; i < X.rows(); ++i)
      for (Eigen::Index j = 0; j < X.rows(); ++j) {
        EXPECT_EQ(row_eval(X, i, j, s), row_eval(X, j, i, s));
        if (s.family == KernelFamily::WhiteNoise) continue;
        const Vector a = X.row(i).transpose(), b = X.row(j).transpose();
        const std::span<const double> sa(a.data(), 2), sb(b.data(), 2);
        EXPECT_LE(std::abs(pvgp::eval_main(sa, sb, s)), pvgp::eval_main(sa, sa, s));
      }
  }
}

TEST(KernelProperties, PeriodicWarpRepeats) {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> d(-288.0, 288.0);
  std::uniform_int_distribution<int> n(-10, 10);
  for (KernelFamily base : {KernelFamily::SquaredExponential, KernelFamily::RationalQuadratic,
                            KernelFamily::Matern}) {
    for (int k = 0; k < 200; ++k) {
      const double x = d(rng);
      const double shifted = x + n(rng) * 288.0;
      EXPECT_NEAR(pvgp::eval_periodic(shifted, 1.0, 0.7, 288.0, base, 2.0),
                  pvgp::eval_periodic(x, 1.0, 0.7, 288.0, base, 2.0), 1e-12);
    }
  }
}

TEST(KernelProperties, RationalQuadraticConvergesToSquaredExponential) {
  double previous = INFINITY;
  for (int p = 0; p <= 20; ++p) {
    const double alpha = std::ldexp(1.0, p);
    double sup = 0.0;
    for (int k = 0; k <= 1000; ++k) {
      const double r2 = 10.0 * k / 1000.0;
      sup = std::max(sup, std::abs(pvgp::eval_rq(r2, 1.0, alpha) - pvgp::eval_se(r2, 1.0)));
    }
    EXPECT_LT(sup, previous) << alpha;
    previous = sup;
  }
  EXPECT_LT(previous, 1e-5);
}

TEST(GpProperties, NoiseFreePosteriorInterpolates) {
  std::mt19937_64 rng(104);
  for (const KernelSpec& tmpl : fixtures::family_templates(2)) {
    if (tmpl.family == KernelFamily::WhiteNoise) continue;
    for (int k = 0; k < 10; ++k) {
      KernelSpec s = fixtures::randomize(tmpl, rng, 0.0, 0.0);
      for (double& l : s.lengthscales) l = 0.3;
      const Matrix X = fixtures::random_inputs(rng, 8, 2);
      const Vector y = fixtures::random_targets(rng, 8);
      const pvgp::PosteriorPrediction p = pvgp::posterior({X, y}, X, s);
      EXPECT_LE((p.mean - y).cwiseAbs().maxCoeff(), 1e-6 * y.cwiseAbs().maxCoeff())
          << pvgp::to_string(s);
    }
  }
}

TEST(GpProperties, AddingAPointNeverIncreasesVariance) {
  std::mt19937_64 rng(105);
  for (const KernelSpec& tmpl : fixtures::family_templates(2)) {
    for (int k = 0; k < 10; ++k) {
      const KernelSpec s = fixtures::randomize(tmpl, rng, 1e-3, 0.1);
      const Matrix X = fixtures::random_inputs(rng, 9, 2);
      const Vector y = fixtures::random_targets(rng, 9);
      const Matrix Q = fixtures::random_inputs(rng, 6, 2);
      const Vector small = pvgp::posterior({X.topRows(8), y.head(8)}, Q, s).cov.diagonal();
      const Vector large = pvgp::posterior({X, y}, Q, s).cov.diagonal();
      const double scale = pvgp::prior(Q, s).cov.diagonal().maxCoeff();
      for (Eigen::Index q = 0; q < Q.rows(); ++q)
        EXPECT_LE(large(q), small(q) + 1e-8 * scale) << pvgp::to_string(s);
    }
  }
}

TEST(GpProperties, AffineTargetRescalingRoundTrips) {
  std::mt19937_64 rng(106);
  for (const KernelSpec& tmpl : fixtures::family_templates(2)) {
    const KernelSpec s = fixtures::randomize(tmpl, rng, 1e-3, 0.1);
    const Matrix X = fixtures::random_inputs(rng, 10, 2);
    const Vector y = fixtures::random_targets(rng, 10);
    const Matrix Q = fixtures::random_inputs(rng, 5, 2);
    const double a = 3.7, b = -42.0;
    KernelSpec scaled = s;
    if (scaled.family != KernelFamily::WhiteNoise) scaled.amplitude *= a;
    scaled.noise_variance *= a * a;
    const pvgp::PosteriorPrediction raw = pvgp::posterior({X, y}, Q, s);
    const pvgp::PosteriorPrediction big =
        pvgp::posterior({X, (a * y.array() + b).matrix()}, Q, scaled);
    const Vector back = (big.mean.array() - b) / a;
    EXPECT_LE((back - raw.mean).norm(), 1e-8 * raw.mean.norm());
    EXPECT_LE((big.cov / (a * a) - raw.cov).norm(), 1e-8 * std::max(raw.cov.norm(), 1e-300));
  }
}

TEST(GpProperties, ScalingRoundTrip) {
  std::mt19937_64 rng(107);
  const Matrix X = fixtures::random_inputs(rng, 12, 2);
  const Vector y = fixtures::random_targets(rng, 12);
  const pvgp::TrainingSet t(X, y);
  EXPECT_NEAR(t.scaled_targets().mean(), 0.0, 1e-12);
  const Vector back = (t.scaled_targets().array() * t.target_scale() + t.target_mean()).matrix();
  EXPECT_LE((back - y).cwiseAbs().maxCoeff(), 1e-12 * y.cwiseAbs().maxCoeff());
}

}  // namespace
