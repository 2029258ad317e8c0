#pragma once

#include <span>
#include <vector>

namespace pvgp {

/// Mean absolute error (1/N) sum |actual_i - predicted_i|, in the units of
/// the inputs. Throws DataError on empty or mismatched inputs.
double mae(std::span<const double> actual, std::span<const double> predicted);

/// Quantile by linear interpolation between order statistics (the
/// "type 7" rule); `sorted` must be ascending and non-empty.
double quantile_sorted(std::span<const double> sorted, double q);

/// Tukey box: quartiles, whiskers at the most extreme samples within
/// 1.5 IQR of the box, and everything beyond as outliers.
struct BoxSummary {
  std::size_t count = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  double lower_whisker = 0, upper_whisker = 0;
  std::vector<double> outliers;
};

BoxSummary box_summary(std::vector<double> samples);

double pearson_correlation(std::span<const double> x, std::span<const double> y);

}  // namespace pvgp
