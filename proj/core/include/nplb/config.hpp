#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "nplb/montecarlo.hpp"

namespace nplb {

/// Every tunable the command-line tool resolves. Defaults:
///
///   key                      default        meaning
///   n_trials                 10000          Monte Carlo trials
///   seed                     20240915       run seed
///   alpha                    0.26           per-frame miss probability (1 - recall)
///   detection_map_50         0.756          detector mAP@0.5 (informational)
///   p_general                0.804          general adults
///   p_elderly                0.18           elderly pedestrians
///   p_wheelchair             0.016          wheelchair users
///   coefficient_of_variation 0.125          walking-speed CV (calibrated)
///   floor_fraction           0.5            speed truncation, fraction of nominal
///   design_speed             3.5            ft/s used by the fixed-time formula
///   buffer_s                 5.0            fixed-time buffer, >= 2 s
///   extension_s              3.0            extension per grant
///   threshold_s              4.0            remaining-time trigger
///   max_extensions           2              grants per cycle
///   timeout_frames           10             VRU-free frames before the ID set clears
///   tick_s                   1/30           seconds per frame
///   initial_signal_s         20.0           replay starting phase length
struct Settings {
  SimConfig sim;
  double initial_signal_s = 20.0;
};

struct KeyValue {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

/// `key = value` per line; `#` starts a comment; blank lines are ignored.
/// Throws ConfigError with "<source>:<line>" context.
std::vector<KeyValue> parse_key_values(std::string_view text, std::string_view source = "config");

/// Throws ConfigError for unknown keys or unparseable values.
void apply_setting(Settings& settings, std::string_view key, std::string_view value);

void apply_key_values(Settings& settings, const std::vector<KeyValue>& entries,
                      std::string_view source = "config");

/// Full snapshot in the same text format; doubles are written with enough
/// digits to round-trip exactly.
std::string to_key_values(const Settings& settings);

std::vector<std::string> setting_keys();

}  // namespace nplb
