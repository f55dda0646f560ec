#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

namespace nplb {

/// Detector output classes. The first three are vulnerable road users.
enum class ObjectClass {
  ChildWithoutDisability,
  ElderlyWithoutDisability,
  WithDisability,
  NonVulnerable,
};

constexpr bool is_vru(ObjectClass c) noexcept {
  return c != ObjectClass::NonVulnerable;
}

/// Wire name used in replay files, e.g. "elderly_without_disability".
std::string_view class_name(ObjectClass c) noexcept;
std::optional<ObjectClass> parse_class_name(std::string_view name) noexcept;

inline constexpr std::int64_t kUntrackedId = -1;

struct Detection {
  ObjectClass object_class = ObjectClass::NonVulnerable;
  std::int64_t track_id = kUntrackedId;
  std::optional<double> confidence;
};

struct DetectionFrame {
  std::int64_t frame_index = 0;
  std::vector<Detection> detections;
};

struct ControllerConfig {
  double extension_s = 3.0;
  double threshold_s = 4.0;
  int max_extensions = 2;
  int timeout_frames = 10;
  double tick_s = 1.0 / 30.0;

  /// Throws ConfigError naming the first violated bound.
  void validate() const;
};

/// Controller state between frames.
///
/// The remaining time is kept as the granted budget (initial signal plus
/// extensions) minus elapsed ticks, so repeated frame decrements do not
/// accumulate rounding error around the threshold.
struct ControllerState {
  double signal_budget_s = 0.0;
  std::int64_t ticks_elapsed = 0;
  int extension_count = 0;
  std::set<std::int64_t> vru_ids;
  int vru_timeout = 0;
  bool vru_detected = false;

  double time_left_s(const ControllerConfig& config) const noexcept {
    return signal_budget_s - static_cast<double>(ticks_elapsed) * config.tick_s;
  }
};

struct ExtendSignal {
  double new_time_left_s = 0.0;
  int extension_index = 0;

  friend bool operator==(const ExtendSignal&, const ExtendSignal&) = default;
};

/// std::nullopt is the no-op command.
using SignalCommand = std::optional<ExtendSignal>;

ControllerState new_controller(const ControllerConfig& config,
                               double initial_signal_s);

/// Processes one frame in place and returns the emitted command.
SignalCommand advance(ControllerState& state, const DetectionFrame& frame,
                      const ControllerConfig& config);

struct StepResult {
  ControllerState state;
  SignalCommand command;
};

/// Pure form of advance().
StepResult step(const ControllerState& state, const DetectionFrame& frame,
                const ControllerConfig& config);

struct CommandRecord {
  std::int64_t frame_index = 0;
  ExtendSignal command;
};

/// Controller state observed after a frame has been processed.
struct FrameTrace {
  std::int64_t frame_index = 0;
  bool vru_detected = false;
  std::vector<std::int64_t> vru_ids;
  int vru_timeout = 0;
  int extension_count = 0;
  double time_left_s = 0.0;
};

struct ReplayReport {
  std::vector<CommandRecord> commands;
  std::vector<FrameTrace> trace;
  double initial_signal_s = 0.0;
  double final_time_left_s = 0.0;
  double final_duration_s = 0.0;
  int extensions_granted = 0;
};

/// Runs the controller over an ordered frame stream. Throws StreamOrderError
/// if frame indices do not strictly increase.
ReplayReport run_replay(const ControllerConfig& config, double initial_signal_s,
                        std::span<const DetectionFrame> frames);

}  // namespace nplb
