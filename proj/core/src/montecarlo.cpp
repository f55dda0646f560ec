#include "nplb/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "nplb/error.hpp"

namespace nplb {
namespace {

unsigned resolve_threads(unsigned threads, std::size_t work) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(work, 1)));
}

// Calls fn(i) for i in [0, n) over contiguous chunks. fn must only write to
// slot i of its output, which keeps the result independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  threads = resolve_threads(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back([&fn, begin, end] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
}

double binomial_se(double p, std::int64_t n) {
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

ArmStats arm_stats(const std::vector<TrialOutcome>& outcomes) {
  ArmStats stats;
  std::int64_t stranded = 0;
  double total = 0.0;
  std::vector<double> durations;
  durations.reserve(outcomes.size());
  for (const TrialOutcome& o : outcomes) {
    if (o.stranded) ++stranded;
    total += o.signal_duration_s;
    durations.push_back(o.signal_duration_s);
    stats.duration_max = std::max(stats.duration_max, o.signal_duration_s);
  }
  const auto n = static_cast<std::int64_t>(outcomes.size());
  stats.stranding_rate = static_cast<double>(stranded) / static_cast<double>(n);
  stats.se = binomial_se(stats.stranding_rate, n);
  stats.duration_mean = total / static_cast<double>(n);
  stats.duration_median = median_of(std::move(durations));
  return stats;
}

std::vector<Scenario> sample_scenarios(const SimConfig& config, unsigned threads) {
  std::vector<Scenario> scenarios(static_cast<std::size_t>(config.n_trials));
  parallel_for(scenarios.size(), threads, [&](std::size_t i) {
    RandomStream rng = RandomStream::for_trial(config.seed, i, StreamTag::Scenario);
    scenarios[i] = sample_scenario(rng, config.demographics, config.speed_model);
  });
  return scenarios;
}

}  // namespace

void SimConfig::validate() const {
  if (n_trials < 1) throw ConfigError(fmt::format("n_trials must be >= 1, got {}", n_trials));
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError(fmt::format("alpha must be in [0, 1], got {}", alpha));
  }
  demographics.validate();
  speed_model.validate();
  policy.validate();
  controller.validate();
}

std::vector<TrialPair> run_trials(const SimConfig& config, unsigned threads) {
  config.validate();
  const std::vector<Scenario> scenarios = sample_scenarios(config, threads);
  std::vector<TrialPair> trials(scenarios.size());
  parallel_for(trials.size(), threads, [&](std::size_t i) {
    RandomStream detections = RandomStream::for_trial(config.seed, i, StreamTag::Detection);
    trials[i].scenario = scenarios[i];
    trials[i].fixed = simulate_fixed(scenarios[i], config.policy);
    trials[i].nplb = simulate_nplb(scenarios[i], config.policy, config.controller,
                                   config.alpha, detections);
  });
  return trials;
}

SimReport summarize(const SimConfig& config, const std::vector<TrialPair>& trials) {
  if (trials.empty()) throw ValidationError("cannot summarize zero trials");

  std::vector<TrialOutcome> fixed;
  std::vector<TrialOutcome> nplb;
  fixed.reserve(trials.size());
  nplb.reserve(trials.size());
  SimReport report;
  report.n_trials = static_cast<std::int64_t>(trials.size());
  report.seed = config.seed;
  report.extension_histogram.assign(static_cast<std::size_t>(config.controller.max_extensions) + 1, 0);
  for (const TrialPair& t : trials) {
    fixed.push_back(t.fixed);
    nplb.push_back(t.nplb);
    ++report.extension_histogram.at(static_cast<std::size_t>(t.nplb.extensions_granted));
  }
  report.fixed = arm_stats(fixed);
  report.nplb = arm_stats(nplb);
  if (report.fixed.stranding_rate > 0.0) {
    report.improvement_pct = (report.fixed.stranding_rate - report.nplb.stranding_rate) /
                             report.fixed.stranding_rate * 100.0;
  }
  return report;
}

SimReport run_comparison(const SimConfig& config, unsigned threads) {
  return summarize(config, run_trials(config, threads));
}

double fixed_stranding_rate(const SimConfig& config, unsigned threads) {
  config.validate();
  const std::vector<Scenario> scenarios = sample_scenarios(config, threads);
  const auto stranded = std::count_if(scenarios.begin(), scenarios.end(), [&](const Scenario& s) {
    return simulate_fixed(s, config.policy).stranded;
  });
  return static_cast<double>(stranded) / static_cast<double>(scenarios.size());
}

std::vector<double> linear_grid(double first, double last, double step) {
  if (!(step > 0.0)) throw ConfigError(fmt::format("grid step must be > 0, got {}", step));
  if (last < first) throw ConfigError(fmt::format("grid end {} is below start {}", last, first));
  std::vector<double> values;
  for (std::size_t i = 0;; ++i) {
    const double v = first + static_cast<double>(i) * step;
    if (v > last + 1e-9) break;
    values.push_back(v);
  }
  return values;
}

std::vector<double> default_sweep_axis() { return linear_grid(3.0, 6.0, 0.5); }

SweepGrid parameter_sweep(const SimConfig& config, const std::vector<double>& tau_e_grid,
                          const std::vector<double>& tau_t_grid, unsigned threads) {
  config.validate();
  if (tau_e_grid.empty() || tau_t_grid.empty()) throw ConfigError("sweep grids must be non-empty");
  for (double v : tau_e_grid) {
    if (!(v > 0.0)) throw ConfigError(fmt::format("tau_e value {} must be > 0", v));
  }
  for (double v : tau_t_grid) {
    if (!(v > 0.0)) throw ConfigError(fmt::format("tau_t value {} must be > 0", v));
  }

  const std::vector<Scenario> scenarios = sample_scenarios(config, threads);
  const std::size_t n_cells = tau_e_grid.size() * tau_t_grid.size();
  const std::size_t n = scenarios.size();

  // outcome[c * n + i]: trial i under cell c.
  std::vector<TrialOutcome> outcomes(n_cells * n);
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t c = 0; c < n_cells; ++c) {
      ControllerConfig cc = config.controller;
      cc.extension_s = tau_e_grid[c / tau_t_grid.size()];
      cc.threshold_s = tau_t_grid[c % tau_t_grid.size()];
      RandomStream detections = RandomStream::for_trial(config.seed, i, StreamTag::Detection);
      outcomes[c * n + i] = simulate_nplb(scenarios[i], config.policy, cc, config.alpha, detections);
    }
  });

  SweepGrid grid{tau_e_grid, tau_t_grid, {}};
  grid.cells.reserve(n_cells);
  for (std::size_t c = 0; c < n_cells; ++c) {
    SweepCell cell;
    cell.tau_e = tau_e_grid[c / tau_t_grid.size()];
    cell.tau_t = tau_t_grid[c % tau_t_grid.size()];
    std::int64_t stranded = 0;
    std::int64_t extensions = 0;
    double duration = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const TrialOutcome& o = outcomes[c * n + i];
      stranded += o.stranded ? 1 : 0;
      extensions += o.extensions_granted;
      duration += o.signal_duration_s;
    }
    const auto count = static_cast<double>(n);
    cell.stranding_rate = static_cast<double>(stranded) / count;
    cell.mean_extensions = static_cast<double>(extensions) / count;
    cell.mean_duration = duration / count;
    grid.cells.push_back(cell);
  }
  return grid;
}

CalibrationResult calibrate_speed_cv(const SimConfig& config, double target_rate,
                                     double tolerance, unsigned threads) {
  if (!(target_rate > 0.0 && target_rate < 1.0)) {
    throw ConfigError(fmt::format("calibration target must be in (0, 1), got {}", target_rate));
  }
  if (!(tolerance >= 0.0)) throw ConfigError("calibration tolerance must be >= 0");

  CalibrationResult result;
  result.target_rate = target_rate;
  result.tolerance = tolerance;

  SimConfig trial = config;
  auto rate_at = [&](double cv) {
    trial.speed_model.coefficient_of_variation = cv;
    ++result.evaluations;
    return fixed_stranding_rate(trial, threads);
  };
  auto accept = [&](double cv, double rate) {
    result.coefficient_of_variation = cv;
    result.achieved_rate = rate;
    return result;
  };

  double lo = 0.0;
  double hi = 0.5;
  double rate_lo = rate_at(lo);
  if (std::abs(rate_lo - target_rate) <= tolerance) return accept(lo, rate_lo);
  double rate_hi = rate_at(hi);
  if (std::abs(rate_hi - target_rate) <= tolerance) return accept(hi, rate_hi);
  if (target_rate < std::min(rate_lo, rate_hi) || target_rate > std::max(rate_lo, rate_hi)) {
    throw CalibrationError(
        fmt::format("fixed stranding target {} is unreachable for CV in [{}, {}]", target_rate, lo, hi),
        lo, hi, rate_lo, rate_hi);
  }

  const bool increasing = rate_hi > rate_lo;
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double rate = rate_at(mid);
    if (std::abs(rate - target_rate) <= tolerance) return accept(mid, rate);
    if ((rate < target_rate) == increasing) {
      lo = mid;
      rate_lo = rate;
    } else {
      hi = mid;
      rate_hi = rate;
    }
  }
  throw CalibrationError(
      fmt::format("bisection did not reach tolerance {} around target {}", tolerance, target_rate),
      lo, hi, rate_lo, rate_hi);
}

}  // namespace nplb
