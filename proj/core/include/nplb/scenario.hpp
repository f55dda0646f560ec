#pragma once

#include <string_view>

#include "nplb/controller.hpp"
#include "nplb/random.hpp"

namespace nplb {

enum class PedestrianType { GeneralAdult, Elderly, Wheelchair };

/// Nominal walking speed in ft/s.
constexpr double nominal_speed(PedestrianType t) noexcept {
  switch (t) {
    case PedestrianType::GeneralAdult: return 4.00;
    case PedestrianType::Elderly: return 2.80;
    case PedestrianType::Wheelchair: return 3.55;
  }
  return 0.0;
}

std::string_view pedestrian_type_name(PedestrianType t) noexcept;

/// Class the detector reports for a simulated pedestrian. General adults
/// map to NonVulnerable and so never trigger an extension.
constexpr ObjectClass ped_type_to_class(PedestrianType t) noexcept {
  switch (t) {
    case PedestrianType::Elderly: return ObjectClass::ElderlyWithoutDisability;
    case PedestrianType::Wheelchair: return ObjectClass::WithDisability;
    case PedestrianType::GeneralAdult: break;
  }
  return ObjectClass::NonVulnerable;
}

struct Demographics {
  double p_general = 0.804;
  double p_elderly = 0.18;
  double p_wheelchair = 0.016;

  void validate() const;
};

/// Speed calibrated against the 9.10 % fixed-time stranding rate with
/// seed kDefaultSeed at 10,000 trials (see `nplb calibrate`).
inline constexpr double kCalibratedSpeedCv = 0.125;

/// Per-type truncated normal: mean = nominal speed, sd = cv * nominal,
/// truncated below at floor_fraction * nominal.
struct SpeedModel {
  double coefficient_of_variation = kCalibratedSpeedCv;
  double floor_fraction = 0.5;

  void validate() const;
};

inline constexpr double kMinCrosswalkFt = 30.0;
inline constexpr double kMaxCrosswalkFt = 60.0;
inline constexpr double kMaxEntryDelayS = 3.0;

struct Scenario {
  PedestrianType ped_type = PedestrianType::GeneralAdult;
  double actual_speed_fps = nominal_speed(PedestrianType::GeneralAdult);
  double crosswalk_length_ft = kMinCrosswalkFt;
  double entry_delay_s = 0.0;
};

/// Fixed-time timing rule: length / design_speed + buffer.
struct SignalPolicy {
  double design_speed_fps = 3.5;
  double buffer_s = 5.0;

  void validate() const;
};

struct TrialOutcome {
  bool stranded = false;
  double signal_duration_s = 0.0;
  int extensions_granted = 0;
  double crossing_time_s = 0.0;
};

/// Draws exactly four uniforms (type, speed, length, delay) in that order.
Scenario sample_scenario(RandomStream& rng, const Demographics& demographics,
                         const SpeedModel& speed_model);

/// Speed for quantile `u` of the truncated normal of `type`.
double speed_at_quantile(PedestrianType type, const SpeedModel& model, double u);

double fixed_signal_duration(double crosswalk_length_ft, const SignalPolicy& policy);

double crossing_time(const Scenario& scenario);

TrialOutcome simulate_fixed(const Scenario& scenario, const SignalPolicy& policy);

/// Frame-by-frame adaptive trial. Consumes one uniform from `detection_rng`
/// per simulated frame starting at frame 0, whether or not the pedestrian is
/// in the crosswalk, so frame f sees the same draw under any controller
/// parameters.
TrialOutcome simulate_nplb(const Scenario& scenario, const SignalPolicy& policy,
                           const ControllerConfig& controller, double alpha,
                           RandomStream& detection_rng);

}  // namespace nplb
