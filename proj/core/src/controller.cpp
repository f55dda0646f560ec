#include "nplb/controller.hpp"

#include <array>
#include <cmath>
#include <string>

#include <fmt/format.h>

#include "nplb/error.hpp"

namespace nplb {
namespace {

constexpr std::array<std::pair<ObjectClass, std::string_view>, 4> kClassNames{{
    {ObjectClass::ChildWithoutDisability, "child_without_disability"},
    {ObjectClass::ElderlyWithoutDisability, "elderly_without_disability"},
    {ObjectClass::WithDisability, "with_disability"},
    {ObjectClass::NonVulnerable, "non_vulnerable"},
}};

}  // namespace

std::string_view class_name(ObjectClass c) noexcept {
  for (const auto& [value, name] : kClassNames) {
    if (value == c) return name;
  }
  return {};
}

std::optional<ObjectClass> parse_class_name(std::string_view name) noexcept {
  for (const auto& [value, wire] : kClassNames) {
    if (wire == name) return value;
  }
  return std::nullopt;
}

void ControllerConfig::validate() const {
  if (!(extension_s > 0.0) || !std::isfinite(extension_s)) {
    throw ConfigError(fmt::format("extension_s must be > 0, got {}", extension_s));
  }
  if (!(threshold_s > 0.0) || !std::isfinite(threshold_s)) {
    throw ConfigError(fmt::format("threshold_s must be > 0, got {}", threshold_s));
  }
  if (max_extensions < 0) {
    throw ConfigError(fmt::format("max_extensions must be >= 0, got {}", max_extensions));
  }
  if (timeout_frames < 1) {
    throw ConfigError(fmt::format("timeout_frames must be >= 1, got {}", timeout_frames));
  }
  if (!(tick_s > 0.0) || !std::isfinite(tick_s)) {
    throw ConfigError(fmt::format("tick_s must be > 0, got {}", tick_s));
  }
}

ControllerState new_controller(const ControllerConfig& config,
                               double initial_signal_s) {
  config.validate();
  if (!(initial_signal_s > 0.0) || !std::isfinite(initial_signal_s)) {
    throw ConfigError(
        fmt::format("initial signal time must be > 0, got {}", initial_signal_s));
  }
  ControllerState state;
  state.signal_budget_s = initial_signal_s;
  return state;
}

SignalCommand advance(ControllerState& state, const DetectionFrame& frame,
                      const ControllerConfig& config) {
  state.vru_detected = false;
  for (const Detection& d : frame.detections) {
    if (!is_vru(d.object_class)) continue;
    state.vru_detected = true;
    // Untracked VRUs still count as detected; only the ID set skips them.
    if (d.track_id != kUntrackedId) state.vru_ids.insert(d.track_id);
  }

  if (!state.vru_detected) {
    ++state.vru_timeout;
    if (state.vru_timeout > config.timeout_frames) {
      state.vru_ids.clear();
      state.vru_timeout = 0;
    }
  } else {
    state.vru_timeout = 0;
  }

  SignalCommand command;
  if (state.vru_detected && state.time_left_s(config) < config.threshold_s &&
      state.extension_count < config.max_extensions) {
    state.signal_budget_s += config.extension_s;
    ++state.extension_count;
    command = ExtendSignal{state.time_left_s(config), state.extension_count};
  }

  ++state.ticks_elapsed;
  return command;
}

StepResult step(const ControllerState& state, const DetectionFrame& frame,
                const ControllerConfig& config) {
  StepResult result{state, std::nullopt};
  result.command = advance(result.state, frame, config);
  return result;
}

ReplayReport run_replay(const ControllerConfig& config, double initial_signal_s,
                        std::span<const DetectionFrame> frames) {
  ControllerState state = new_controller(config, initial_signal_s);
  ReplayReport report;
  report.initial_signal_s = initial_signal_s;
  report.trace.reserve(frames.size());

  std::optional<std::int64_t> previous;
  for (const DetectionFrame& frame : frames) {
    if (previous && frame.frame_index <= *previous) {
      throw StreamOrderError(fmt::format(
          "frame {} follows frame {}; frame indices must strictly increase",
          frame.frame_index, *previous));
    }
    previous = frame.frame_index;

    if (SignalCommand command = advance(state, frame, config)) {
      report.commands.push_back({frame.frame_index, *command});
    }
    report.trace.push_back({frame.frame_index, state.vru_detected,
                            {state.vru_ids.begin(), state.vru_ids.end()},
                            state.vru_timeout, state.extension_count,
                            state.time_left_s(config)});
  }

  report.final_time_left_s = state.time_left_s(config);
  report.extensions_granted = state.extension_count;
  report.final_duration_s = state.signal_budget_s;
  return report;
}

}  // namespace nplb
