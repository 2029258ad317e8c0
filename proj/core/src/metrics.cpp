#include "pvgp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pvgp/error.hpp"

namespace pvgp {

double mae(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size())
    throw DataError("mae: length mismatch (" + std::to_string(actual.size()) +
                    " vs " + std::to_string(predicted.size()) + ")");
  if (actual.empty()) throw DataError("mae: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i)
    sum += std::abs(actual[i] - predicted[i]);
  return sum / static_cast<double>(actual.size());
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw DataError("quantile of an empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

BoxSummary box_summary(std::vector<double> samples) {
  if (samples.empty()) throw DataError("box summary of an empty sample");
  std::sort(samples.begin(), samples.end());
  BoxSummary b;
  b.count = samples.size();
  b.min = samples.front();
  b.max = samples.back();
  b.q1 = quantile_sorted(samples, 0.25);
  b.median = quantile_sorted(samples, 0.5);
  b.q3 = quantile_sorted(samples, 0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  b.lower_whisker = b.q1;
  b.upper_whisker = b.q3;
  for (double v : samples) {
    if (v < lo_fence || v > hi_fence) {
      b.outliers.push_back(v);
    } else {
      b.lower_whisker = std::min(b.lower_whisker, v);
      b.upper_whisker = std::max(b.upper_whisker, v);
    }
  }
  return b;
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw DataError("correlation needs two equal-length samples of size >= 2");
  const auto n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace pvgp
