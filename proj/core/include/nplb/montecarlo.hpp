#pragma once

#include <cstdint>
#include <vector>

#include "nplb/controller.hpp"
#include "nplb/scenario.hpp"

namespace nplb {

inline constexpr std::uint64_t kDefaultSeed = 20240915;

struct SimConfig {
  std::int64_t n_trials = 10'000;
  std::uint64_t seed = kDefaultSeed;
  /// Per-frame miss probability (1 - recall).
  double alpha = 0.26;
  /// Detector mAP@0.5. Carried for reporting; it does not enter the trial loop.
  double detection_map_50 = 0.756;
  Demographics demographics;
  SpeedModel speed_model;
  SignalPolicy policy;
  ControllerConfig controller;

  void validate() const;
};

struct TrialPair {
  Scenario scenario;
  TrialOutcome fixed;
  TrialOutcome nplb;
};

struct ArmStats {
  double stranding_rate = 0.0;
  /// Binomial standard error of stranding_rate.
  double se = 0.0;
  double duration_mean = 0.0;
  double duration_median = 0.0;
  double duration_max = 0.0;
};

struct SimReport {
  std::int64_t n_trials = 0;
  std::uint64_t seed = 0;
  ArmStats fixed;
  ArmStats nplb;
  /// (fixed - nplb) / fixed * 100; 0 when the fixed rate is 0.
  double improvement_pct = 0.0;
  /// Trials with k extensions, k = 0..max_extensions.
  std::vector<std::int64_t> extension_histogram;
};

/// Evaluates every trial under both arms with common random numbers.
/// `threads` = 0 uses the hardware concurrency. Results are ordered by trial
/// index and do not depend on the thread count.
std::vector<TrialPair> run_trials(const SimConfig& config, unsigned threads = 1);

SimReport summarize(const SimConfig& config, const std::vector<TrialPair>& trials);

SimReport run_comparison(const SimConfig& config, unsigned threads = 1);

/// Fixed-time stranding rate only; no frame loop.
double fixed_stranding_rate(const SimConfig& config, unsigned threads = 1);

struct SweepCell {
  double tau_e = 0.0;
  double tau_t = 0.0;
  double stranding_rate = 0.0;
  double mean_extensions = 0.0;
  double mean_duration = 0.0;
};

/// NPLB-arm stranding over a tau_e x tau_t grid. Cells are row-major with
/// tau_e as the outer index.
struct SweepGrid {
  std::vector<double> tau_e_values;
  std::vector<double> tau_t_values;
  std::vector<SweepCell> cells;

  const SweepCell& at(std::size_t e, std::size_t t) const {
    return cells.at(e * tau_t_values.size() + t);
  }
};

/// first, first + step, ... up to and including last (within 1e-9).
std::vector<double> linear_grid(double first, double last, double step);

/// 3.0, 3.5, ..., 6.0.
std::vector<double> default_sweep_axis();

SweepGrid parameter_sweep(const SimConfig& config, const std::vector<double>& tau_e_grid,
                          const std::vector<double>& tau_t_grid, unsigned threads = 1);

struct CalibrationResult {
  double coefficient_of_variation = 0.0;
  double achieved_rate = 0.0;
  double target_rate = 0.0;
  double tolerance = 0.0;
  int evaluations = 0;
};

/// Bisects the speed CV over [0, 0.5] until the fixed stranding rate is
/// within `tolerance` of `target_rate`. Throws CalibrationError when the
/// target lies outside the rates at the bracket ends.
CalibrationResult calibrate_speed_cv(const SimConfig& config, double target_rate = 0.091,
                                     double tolerance = 0.002, unsigned threads = 1);

}  // namespace nplb
