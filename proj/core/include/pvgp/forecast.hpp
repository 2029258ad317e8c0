#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pvgp/fit.hpp"
#include "pvgp/gp.hpp"
#include "pvgp/pipeline.hpp"

namespace pvgp {

enum class CloudMode { Given, Persistence };

/// Forecast horizon in 5-minute steps.
enum class Horizon : int { FourHours = 48, FortyEightHours = 576 };

inline int horizon_steps(Horizon h) { return static_cast<int>(h); }
std::string horizon_label(Horizon h);      // "4h" / "48h"
std::string cloud_mode_label(CloudMode m); // "given" / "persistence"

/// Periodic (daily) or plain template over (time index, HRV) inputs. Only the
/// structure matters; numeric values are replaced by the fit.
KernelSpec make_kernel_template(KernelFamily radial, MaternNu nu = MaternNu::Half,
                                bool periodic = true, int dims = 2,
                                double period = static_cast<double>(kStepsPerDay));

/// "Matern12", "Squared Exponential", "Rational Quadratic", ... with a
/// " (plain)" suffix for kernels that are not wrapped in the periodic warp.
std::string kernel_label(const KernelSpec& spec);

struct ExperimentConfig {
  int training_days = 21;
  int patch_px = 12;
  KernelSpec kernel = make_kernel_template(KernelFamily::Matern);
  Horizon horizon = Horizon::FortyEightHours;
  CloudMode cloud_mode = CloudMode::Given;
  TimeIndex forecast_start;         // first launch
  int test_days = 1;                // launches at forecast_start + k * 288
  std::vector<SystemId> system_ids; // empty: every system in the dataset
  int training_stride = 1;          // keep every n-th training row, newest first
  int restarts = 2;
  bool use_hrv = true;              // false: time index is the only input
  std::string block;                // report grouping label

  /// Throws ConfigError on out-of-protocol combinations (48 h requires
  /// given cloud coverage) or non-positive counts.
  void validate() const;

  TimeIndex launch(int day) const {
    return TimeIndex{forecast_start.value + day * kStepsPerDay};
  }
};

struct ForecastResult {
  TimeIndex start;
  Matrix query;                    // horizon x dims
  PosteriorPrediction prediction;  // raw posterior, watts
  Vector clamped_mean;             // mean clipped to [0, capacity]
  Vector truth;
  double mae = 0.0;                // over every step of the horizon
  double mae_daylight = 0.0;       // steps with the sun above the horizon; NaN if none
  KernelSpec fitted;
  Eigen::Index training_points = 0;
};

/// Training rows [start - days*288, start), thinned by the stride counting
/// back from the newest row. Throws CoverageError if the series does not
/// cover the window or no rows remain.
TrainingSet training_set_for(const AssembledSeries& series,
                             const ExperimentConfig& cfg, TimeIndex start);

/// Query rows for the horizon after `start`: consecutive time indices with the
/// observed HRV (given) or the last training-window HRV (persistence).
Matrix forecast_query(const AssembledSeries& series, const ExperimentConfig& cfg,
                      TimeIndex start);

/// Seed for the hyperparameter fit of one (system, launch, training setup).
/// Independent of horizon and cloud mode, so both modes share a fit.
std::uint64_t fit_seed(std::uint64_t base, SystemId system, TimeIndex start,
                       const ExperimentConfig& cfg);

/// Posterior, clamping and MAE for an already-fitted kernel.
ForecastResult predict_with(const AssembledSeries& series,
                            const ExperimentConfig& cfg, TimeIndex start,
                            const KernelSpec& fitted);

/// Fit on the training window, then predict_with.
ForecastResult run_forecast(const AssembledSeries& series,
                            const ExperimentConfig& cfg, TimeIndex start,
                            std::uint64_t seed = 0, int jobs = 1);

/// 48-hour protocol with observed cloud coverage at every step.
ForecastResult forecast_48h(const AssembledSeries& series,
                            const ExperimentConfig& cfg, std::uint64_t seed = 0);

/// 4-hour protocol, cloud coverage given or held at its last observed value.
ForecastResult forecast_4h(const AssembledSeries& series,
                           const ExperimentConfig& cfg, std::uint64_t seed = 0);

}  // namespace pvgp
