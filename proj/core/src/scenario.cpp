#include "nplb/scenario.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "nplb/error.hpp"

namespace nplb {
namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

std::string_view pedestrian_type_name(PedestrianType t) noexcept {
  switch (t) {
    case PedestrianType::GeneralAdult: return "general_adult";
    case PedestrianType::Elderly: return "elderly";
    case PedestrianType::Wheelchair: return "wheelchair";
  }
  return {};
}

void Demographics::validate() const {
  if (!is_probability(p_general) || !is_probability(p_elderly) ||
      !is_probability(p_wheelchair)) {
    throw ConfigError("demographic probabilities must lie in [0, 1]");
  }
  const double total = p_general + p_elderly + p_wheelchair;
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError(fmt::format("demographic probabilities sum to {}, not 1", total));
  }
}

void SpeedModel::validate() const {
  if (!(coefficient_of_variation >= 0.0) || !std::isfinite(coefficient_of_variation)) {
    throw ConfigError(fmt::format("coefficient_of_variation must be >= 0, got {}",
                                  coefficient_of_variation));
  }
  if (!(floor_fraction > 0.0 && floor_fraction <= 1.0)) {
    throw ConfigError(fmt::format("floor_fraction must be in (0, 1], got {}", floor_fraction));
  }
}

void SignalPolicy::validate() const {
  if (!(design_speed_fps > 0.0) || !std::isfinite(design_speed_fps)) {
    throw ConfigError(fmt::format("design_speed must be > 0, got {}", design_speed_fps));
  }
  if (!(buffer_s >= 2.0) || !std::isfinite(buffer_s)) {
    throw ConfigError(fmt::format("buffer_s must be >= 2, got {}", buffer_s));
  }
}

double speed_at_quantile(PedestrianType type, const SpeedModel& model, double u) {
  const double nominal = nominal_speed(type);
  const double cv = model.coefficient_of_variation;
  if (cv == 0.0) return nominal;

  // Inverse CDF of N(0,1) truncated below at z_floor.
  const double z_floor = (model.floor_fraction - 1.0) / cv;
  const double p_floor = normal_cdf(z_floor);
  const double z = normal_quantile(p_floor + u * (1.0 - p_floor));
  return std::max(nominal * (1.0 + cv * z), model.floor_fraction * nominal);
}

Scenario sample_scenario(RandomStream& rng, const Demographics& demographics,
                         const SpeedModel& speed_model) {
  const double u_type = rng.uniform();
  const double u_speed = rng.uniform();
  const double u_length = rng.uniform();
  const double u_delay = rng.uniform();

  Scenario s;
  if (u_type < demographics.p_general) {
    s.ped_type = PedestrianType::GeneralAdult;
  } else if (u_type < demographics.p_general + demographics.p_elderly) {
    s.ped_type = PedestrianType::Elderly;
  } else {
    s.ped_type = PedestrianType::Wheelchair;
  }
  s.actual_speed_fps = speed_at_quantile(s.ped_type, speed_model, u_speed);
  s.crosswalk_length_ft = kMinCrosswalkFt + (kMaxCrosswalkFt - kMinCrosswalkFt) * u_length;
  s.entry_delay_s = kMaxEntryDelayS * u_delay;
  return s;
}

double fixed_signal_duration(double crosswalk_length_ft, const SignalPolicy& policy) {
  if (!(crosswalk_length_ft > 0.0)) {
    throw ValidationError(
        fmt::format("crosswalk length must be > 0, got {}", crosswalk_length_ft));
  }
  return crosswalk_length_ft / policy.design_speed_fps + policy.buffer_s;
}

double crossing_time(const Scenario& scenario) {
  return scenario.entry_delay_s + scenario.crosswalk_length_ft / scenario.actual_speed_fps;
}

TrialOutcome simulate_fixed(const Scenario& scenario, const SignalPolicy& policy) {
  TrialOutcome out;
  out.signal_duration_s = fixed_signal_duration(scenario.crosswalk_length_ft, policy);
  out.crossing_time_s = crossing_time(scenario);
  out.stranded = out.crossing_time_s > out.signal_duration_s;
  return out;
}

TrialOutcome simulate_nplb(const Scenario& scenario, const SignalPolicy& policy,
                           const ControllerConfig& controller, double alpha,
                           RandomStream& detection_rng) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError(fmt::format("alpha must be in [0, 1], got {}", alpha));
  }
  const double base = fixed_signal_duration(scenario.crosswalk_length_ft, policy);
  const double exit_time = crossing_time(scenario);
  const ObjectClass cls = ped_type_to_class(scenario.ped_type);

  ControllerState state = new_controller(controller, base);
  DetectionFrame frame;
  frame.detections.reserve(1);

  for (std::int64_t f = 0;; ++f) {
    const double now = static_cast<double>(f) * controller.tick_s;
    if (now >= exit_time || state.time_left_s(controller) <= 0.0) break;

    const double u = detection_rng.uniform();
    frame.frame_index = f;
    frame.detections.clear();
    if (now >= scenario.entry_delay_s && u >= alpha) {
      frame.detections.push_back({cls, 1, std::nullopt});
    }
    advance(state, frame, controller);
  }

  TrialOutcome out;
  out.extensions_granted = state.extension_count;
  out.signal_duration_s = state.signal_budget_s;
  out.crossing_time_s = exit_time;
  out.stranded = exit_time > out.signal_duration_s;
  return out;
}

}  // namespace nplb
