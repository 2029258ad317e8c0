#include "pvgp/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "pvgp/error.hpp"
#include "pvgp/parallel.hpp"

namespace pvgp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double column_range(const Matrix& X, Eigen::Index col) {
  const double r = X.col(col).maxCoeff() - X.col(col).minCoeff();
  return r > 0.0 ? r : 1.0;
}

struct Minimum {
  Vector x;
  double value = kInf;
  int iterations = 0;
};

// Projected BFGS with Armijo backtracking. Components sitting on a bound with
// the gradient pointing outward are frozen for the step.
Minimum minimize(const TrainingSet& train, const HyperParameterization& map,
                 const Vector& start, const FitOptions& opt) {
  Minimum best;
  Vector x = map.clamp(start);
  double fx = fit_objective(train, map, x);
  best.x = x;
  best.value = fx;
  if (!std::isfinite(fx)) return best;

  const Eigen::Index p = x.size();
  Vector g = fit_objective_gradient(train, map, x, opt.fd_step);
  Matrix H = Matrix::Identity(p, p);
  constexpr double kBoundEps = 1e-12;
  constexpr double kMaxStep = 2.0;

  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    if (!g.allFinite()) break;
    std::vector<bool> frozen(static_cast<std::size_t>(p), false);
    Vector pg = g;
    for (Eigen::Index i = 0; i < p; ++i) {
      const bool at_lo = x(i) <= map.hard_lower()(i) + kBoundEps && g(i) > 0.0;
      const bool at_hi = x(i) >= map.hard_upper()(i) - kBoundEps && g(i) < 0.0;
      if (at_lo || at_hi) {
        frozen[static_cast<std::size_t>(i)] = true;
        pg(i) = 0.0;
      }
    }
    if (pg.lpNorm<Eigen::Infinity>() < 1e-10) break;

    Vector d = -H * pg;
    for (Eigen::Index i = 0; i < p; ++i)
      if (frozen[static_cast<std::size_t>(i)]) d(i) = 0.0;
    if (!(d.dot(pg) < 0.0)) {
      H.setIdentity();
      d = -pg;
    }
    const double dmax = d.lpNorm<Eigen::Infinity>();
    if (dmax > kMaxStep) d *= kMaxStep / dmax;

    double t = 1.0;
    Vector x_new;
    double f_new = kInf;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      x_new = map.clamp(x + t * d);
      f_new = fit_objective(train, map, x_new);
      if (std::isfinite(f_new) && f_new <= fx + 1e-4 * g.dot(x_new - x)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (H.isIdentity()) break;
      H.setIdentity();
      continue;
    }

    const double improvement = fx - f_new;
    const Vector g_new = fit_objective_gradient(train, map, x_new, opt.fd_step);
    const Vector s = x_new - x;
    const Vector y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12) {
      const double rho = 1.0 / sy;
      const Matrix I = Matrix::Identity(p, p);
      H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) +
          rho * s * s.transpose();
    }
    x = x_new;
    fx = f_new;
    g = g_new;
    if (improvement < opt.tolerance) {
      ++it;
      break;
    }
  }
  best.x = x;
  best.value = fx;
  best.iterations = it;
  return best;
}

}  // namespace

HyperParameterization::HyperParameterization(const KernelSpec& tmpl,
                                             const TrainingSet& train)
    : template_(tmpl) {
  tmpl.validate_for_dims(static_cast<std::size_t>(train.dims()));
  const double scale = train.target_scale();
  const double var = scale * scale;

  if (tmpl.family != KernelFamily::WhiteNoise) {
    add("h", 0.01 * scale, 10.0 * scale, 1e-4 * scale, 100.0 * scale);
    Eigen::Index first_dim = 0;
    if (tmpl.family == KernelFamily::Periodic) {
      add("w", 0.1, 10.0, 0.01, 100.0);
      first_dim = 1;
    }
    for (Eigen::Index d = first_dim; d < train.dims(); ++d) {
      const double range = column_range(train.inputs(), d);
      const double lo = std::min(1.0, 0.1 * range);
      const double hi = 10.0 * range;
      add("lambda" + std::to_string(d), lo, hi, 0.1 * lo, 100.0 * range);
    }
    if (tmpl.radial_family() == KernelFamily::RationalQuadratic)
      add("alpha", 0.1, 100.0, 0.01, 1e3);
  }
  add("sigma2", 1e-6 * var, var, 1e-10 * var, 10.0 * var);
}

void HyperParameterization::add(std::string name, double init_lo,
                                double init_hi, double hard_lo,
                                double hard_hi) {
  names_.push_back(std::move(name));
  const auto n = static_cast<Eigen::Index>(names_.size());
  init_lo_.conservativeResize(n);
  init_hi_.conservativeResize(n);
  hard_lo_.conservativeResize(n);
  hard_hi_.conservativeResize(n);
  init_lo_(n - 1) = std::log(init_lo);
  init_hi_(n - 1) = std::log(init_hi);
  hard_lo_(n - 1) = std::log(hard_lo);
  hard_hi_(n - 1) = std::log(hard_hi);
}

Vector HyperParameterization::to_vector(const KernelSpec& spec) const {
  Vector v(size());
  Eigen::Index k = 0;
  if (spec.family != KernelFamily::WhiteNoise) {
    v(k++) = std::log(spec.amplitude);
    if (spec.family == KernelFamily::Periodic) v(k++) = std::log(spec.roughness);
    for (double l : spec.lengthscales) v(k++) = std::log(l);
    if (spec.radial_family() == KernelFamily::RationalQuadratic)
      v(k++) = std::log(spec.alpha);
  }
  v(k++) = std::log(spec.noise_variance);
  return v;
}

KernelSpec HyperParameterization::to_spec(const Vector& log_params) const {
  KernelSpec spec = template_;
  Eigen::Index k = 0;
  if (spec.family != KernelFamily::WhiteNoise) {
    spec.amplitude = std::exp(log_params(k++));
    if (spec.family == KernelFamily::Periodic)
      spec.roughness = std::exp(log_params(k++));
    for (double& l : spec.lengthscales) l = std::exp(log_params(k++));
    if (spec.radial_family() == KernelFamily::RationalQuadratic)
      spec.alpha = std::exp(log_params(k++));
  }
  spec.noise_variance = std::exp(log_params(k++));
  return spec;
}

Vector HyperParameterization::clamp(const Vector& log_params) const {
  return log_params.cwiseMax(hard_lo_).cwiseMin(hard_hi_);
}

double fit_objective(const TrainingSet& train, const HyperParameterization& map,
                     const Vector& log_params) {
  if (!log_params.allFinite()) return kInf;
  try {
    const double lml = log_marginal_likelihood(train, map.to_spec(log_params));
    return std::isfinite(lml) ? -lml : kInf;
  } catch (const ConditioningError&) {
    return kInf;
  }
}

Vector fit_objective_gradient(const TrainingSet& train,
                              const HyperParameterization& map,
                              const Vector& log_params, double step) {
  Vector g(log_params.size());
  for (Eigen::Index i = 0; i < log_params.size(); ++i) {
    Vector hi = log_params, lo = log_params;
    hi(i) += step;
    lo(i) -= step;
    g(i) = (fit_objective(train, map, hi) - fit_objective(train, map, lo)) /
           (2.0 * step);
  }
  return g;
}

FitResult fit_hyperparameters(const TrainingSet& train,
                              const KernelSpec& spec_template,
                              const FitOptions& options) {
  if (options.restarts < 1) throw DataError("fit needs at least one restart");
  const HyperParameterization map(spec_template, train);

  FitResult result;
  result.restarts.resize(static_cast<std::size_t>(options.restarts));
  for (std::size_t r = 0; r < result.restarts.size(); ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(options.seed),
                      static_cast<std::uint32_t>(options.seed >> 32),
                      static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Vector start(map.size());
    for (Eigen::Index i = 0; i < start.size(); ++i)
      start(i) = map.init_lower()(i) +
                 unit(rng) * (map.init_upper()(i) - map.init_lower()(i));
    result.restarts[r].start = start;
  }

  parallel_for(result.restarts.size(), options.jobs, [&](std::size_t r) {
    auto& out = result.restarts[r];
    const Minimum m = minimize(train, map, out.start, options);
    out.optimum = m.x;
    out.log_likelihood = std::isfinite(m.value) ? -m.value : -kInf;
    out.iterations = m.iterations;
  });

  bool found = false;
  for (std::size_t r = 0; r < result.restarts.size(); ++r) {
    const double ll = result.restarts[r].log_likelihood;
    if (!std::isfinite(ll)) continue;
    if (!found || ll > result.log_likelihood) {
      found = true;
      result.log_likelihood = ll;
      result.best_restart = r;
    }
  }
  if (!found)
    throw FitError("all " + std::to_string(options.restarts) +
                   " restarts failed to reach a finite objective for kernel " +
                   to_string(spec_template));
  result.spec = map.to_spec(result.restarts[result.best_restart].optimum);
  return result;
}

KernelSpec fit_hyperparameters(const TrainingSet& train,
                               const KernelSpec& spec_template, int restarts,
                               std::uint64_t seed) {
  FitOptions opt;
  opt.restarts = restarts;
  opt.seed = seed;
  return fit_hyperparameters(train, spec_template, opt).spec;
}

}  // namespace pvgp
