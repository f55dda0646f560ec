#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "nplb/controller.hpp"
#include "nplb/error.hpp"
#include "nplb/replay_io.hpp"

namespace nplb {
namespace {

constexpr double kTick = 1.0 / 30.0;

DetectionFrame frame_with(std::int64_t index, std::vector<Detection> detections) {
  return DetectionFrame{index, std::move(detections)};
}

std::vector<DetectionFrame> load_frames(const std::string& name) {
  std::ifstream in(std::string(NPLB_TEST_DATA_DIR) + "/replay/" + name);
  EXPECT_TRUE(in) << name;
  return read_frames(in);
}

std::string load_text(const std::string& name) {
  std::ifstream in(std::string(NPLB_TEST_DATA_DIR) + "/replay/" + name, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(ObjectClass, OnlyFirstThreeAreVulnerable) {
  EXPECT_TRUE(is_vru(ObjectClass::ChildWithoutDisability));
  EXPECT_TRUE(is_vru(ObjectClass::ElderlyWithoutDisability));
  EXPECT_TRUE(is_vru(ObjectClass::WithDisability));
  EXPECT_FALSE(is_vru(ObjectClass::NonVulnerable));
}

TEST(ObjectClass, WireNamesRoundTrip) {
  for (auto c : {ObjectClass::ChildWithoutDisability, ObjectClass::ElderlyWithoutDisability,
                 ObjectClass::WithDisability, ObjectClass::NonVulnerable}) {
    EXPECT_EQ(parse_class_name(class_name(c)), c);
  }
  EXPECT_EQ(class_name(ObjectClass::WithDisability), "with_disability");
  EXPECT_FALSE(parse_class_name("pedestrian").has_value());
}

TEST(NewController, StartsWithInitialSignal) {
  const ControllerConfig config;
  const ControllerState s = new_controller(config, 20.0);
  EXPECT_DOUBLE_EQ(s.time_left_s(config), 20.0);
  EXPECT_EQ(s.extension_count, 0);
  EXPECT_TRUE(s.vru_ids.empty());
  EXPECT_EQ(s.vru_timeout, 0);
  EXPECT_FALSE(s.vru_detected);
}

TEST(NewController, RejectsNonPositiveSignal) {
  EXPECT_THROW(new_controller({}, 0.0), ConfigError);
  EXPECT_THROW(new_controller({}, -3.0), ConfigError);
}

TEST(NewController, RejectsInvalidConfig) {
  ControllerConfig c;
  c.timeout_frames = 0;
  EXPECT_THROW(new_controller(c, 20.0), ConfigError);
  c = {};
  c.tick_s = 0.0;
  EXPECT_THROW(new_controller(c, 20.0), ConfigError);
  c = {};
  c.max_extensions = -1;
  EXPECT_THROW(new_controller(c, 20.0), ConfigError);
}

TEST(NewController, ZeroCapNeverExtends) {
  ControllerConfig config;
  config.max_extensions = 0;
  ControllerState s = new_controller(config, 20.0);
  for (int f = 0; f < 900; ++f) {
    EXPECT_FALSE(advance(s, frame_with(f, {{ObjectClass::WithDisability, 1, {}}}), config));
  }
  EXPECT_EQ(s.extension_count, 0);
}

TEST(Step, ExtendsBelowThreshold) {
  const ControllerConfig config;
  const ControllerState s = new_controller(config, 3.5);
  const StepResult r = step(s, frame_with(0, {{ObjectClass::ElderlyWithoutDisability, 7, 0.9}}), config);
  ASSERT_TRUE(r.command);
  EXPECT_EQ(r.command->extension_index, 1);
  EXPECT_DOUBLE_EQ(r.command->new_time_left_s, 6.5);
  EXPECT_DOUBLE_EQ(r.state.time_left_s(config), 3.5 + 3.0 - kTick);
  EXPECT_EQ(r.state.vru_ids, std::set<std::int64_t>{7});
}

TEST(Step, NoExtensionAboveThreshold) {
  const ControllerConfig config;
  const StepResult r = step(new_controller(config, 10.0),
                            frame_with(0, {{ObjectClass::WithDisability, 2, {}}}), config);
  EXPECT_FALSE(r.command);
  EXPECT_DOUBLE_EQ(r.state.time_left_s(config), 10.0 - kTick);
}

TEST(Step, CapBlocksFurtherExtensions) {
  const ControllerConfig config;
  ControllerState s = new_controller(config, 2.0);
  s.extension_count = 2;
  const StepResult r = step(s, frame_with(0, {{ObjectClass::ChildWithoutDisability, 3, {}}}), config);
  EXPECT_FALSE(r.command);
  EXPECT_EQ(r.state.extension_count, 2);
}

TEST(Step, TimeoutClearsIdsOnEleventhEmptyFrame) {
  const ControllerConfig config;
  ControllerState s = new_controller(config, 20.0);
  s.vru_ids = {7};
  s.vru_timeout = 10;
  const StepResult r = step(s, frame_with(0, {}), config);
  EXPECT_TRUE(r.state.vru_ids.empty());
  EXPECT_EQ(r.state.vru_timeout, 0);
}

TEST(Step, TimeoutKeepsIdsUpToTenEmptyFrames) {
  const ControllerConfig config;
  ControllerState s = new_controller(config, 20.0);
  advance(s, frame_with(0, {{ObjectClass::WithDisability, 4, {}}}), config);
  for (int f = 1; f <= 10; ++f) advance(s, frame_with(f, {}), config);
  EXPECT_EQ(s.vru_ids, std::set<std::int64_t>{4});
  EXPECT_EQ(s.vru_timeout, 10);
  advance(s, frame_with(11, {}), config);
  EXPECT_TRUE(s.vru_ids.empty());
}

TEST(Step, UntrackedVruStillCountsAsDetected) {
  const ControllerConfig config;
  const StepResult r = step(new_controller(config, 3.0),
                            frame_with(0, {{ObjectClass::WithDisability, kUntrackedId, {}}}), config);
  EXPECT_TRUE(r.state.vru_detected);
  EXPECT_TRUE(r.state.vru_ids.empty());
  EXPECT_TRUE(r.command);
}

TEST(Step, NonVulnerableDoesNotResetTimeout) {
  const ControllerConfig config;
  ControllerState s = new_controller(config, 3.0);
  s.vru_timeout = 4;
  const StepResult r = step(s, frame_with(0, {{ObjectClass::NonVulnerable, 9, {}}}), config);
  EXPECT_FALSE(r.state.vru_detected);
  EXPECT_EQ(r.state.vru_timeout, 5);
  EXPECT_FALSE(r.command);
}

TEST(Step, ThresholdComparisonIsStrict) {
  ControllerConfig config;
  config.tick_s = 1.0;
  const StepResult at = step(new_controller(config, 4.0), frame_with(0, {{ObjectClass::WithDisability, 1, {}}}), config);
  EXPECT_FALSE(at.command);
}

// Random streams exercise the per-step invariants.
TEST(StepProperties, InvariantsHoldOnRandomStreams) {
  std::mt19937_64 gen(12345);
  for (int run = 0; run < 200; ++run) {
    ControllerConfig config;
    config.max_extensions = static_cast<int>(gen() % 4);
    config.timeout_frames = 1 + static_cast<int>(gen() % 12);
    config.tick_s = (gen() % 2) ? 1.0 / 30.0 : 0.25;
    ControllerState s = new_controller(config, 1.0 + static_cast<double>(gen() % 20));
    const double initial = s.signal_budget_s;
    int emitted = 0;
    for (int f = 0; f < 400; ++f) {
      std::vector<Detection> dets;
      const int n = static_cast<int>(gen() % 3);
      for (int k = 0; k < n; ++k) {
        dets.push_back({static_cast<ObjectClass>(gen() % 4), static_cast<std::int64_t>(gen() % 6) - 1, {}});
      }
      const bool has_vru = std::any_of(dets.begin(), dets.end(), [](const Detection& d) { return is_vru(d.object_class); });
      const double before = s.time_left_s(config);
      const auto ids_before = s.vru_ids;
      const StepResult r = step(s, frame_with(f, dets), config);
      const double delta = r.state.time_left_s(config) - before;
      if (r.command) {
        ++emitted;
        EXPECT_NEAR(delta, config.extension_s - config.tick_s, 1e-9);
        EXPECT_EQ(r.command->extension_index, r.state.extension_count);
      } else {
        EXPECT_NEAR(delta, -config.tick_s, 1e-9);
      }
      EXPECT_LE(r.state.extension_count, config.max_extensions);
      EXPECT_GE(r.state.vru_timeout, 0);
      EXPECT_LE(r.state.vru_timeout, config.timeout_frames + 1);
      if (has_vru) EXPECT_EQ(r.state.vru_timeout, 0);
      const bool shrank = !std::includes(r.state.vru_ids.begin(), r.state.vru_ids.end(),
                                         ids_before.begin(), ids_before.end());
      if (shrank) EXPECT_TRUE(r.state.vru_ids.empty());
      s = r.state;
    }
    EXPECT_EQ(emitted, s.extension_count);
    EXPECT_DOUBLE_EQ(s.signal_budget_s, initial + emitted * config.extension_s);
  }
}

TEST(RunReplay, EmptyFramesGiveNoCommands) {
  std::vector<DetectionFrame> frames;
  for (int f = 0; f < 100; ++f) frames.push_back(frame_with(f, {}));
  const ReplayReport r = run_replay({}, 20.0, frames);
  EXPECT_TRUE(r.commands.empty());
  EXPECT_DOUBLE_EQ(r.final_duration_s, 20.0);
  EXPECT_EQ(r.trace.size(), 100u);
}

TEST(RunReplay, RejectsOutOfOrderFrames) {
  const std::vector<DetectionFrame> frames{frame_with(0, {}), frame_with(2, {}), frame_with(2, {})};
  EXPECT_THROW(run_replay({}, 20.0, frames), StreamOrderError);
}

TEST(RunReplay, GoldenThirtyFpsStream) {
  const auto frames = load_frames("vru_30fps.jsonl");
  const ReplayReport r = run_replay({}, 20.0, frames);
  ASSERT_EQ(r.commands.size(), 2u);
  EXPECT_EQ(r.commands[0].frame_index, 481);
  EXPECT_EQ(r.commands[1].frame_index, 571);
  // First command sits on the first frame whose pre-step time left is < 4 s.
  for (const FrameTrace& t : r.trace) {
    if (t.frame_index >= 481) break;
    EXPECT_GE(t.time_left_s + kTick, 4.0 - 1e-12);
  }
  std::string log;
  for (const auto& c : r.commands) log += format_command_line(c) + "\n";
  EXPECT_EQ(log, load_text("vru_30fps.commands.jsonl"));
  EXPECT_DOUBLE_EQ(r.final_duration_s, 26.0);
}

TEST(RunReplay, GoldenStreamWithZeroCapHasNoCommands) {
  ControllerConfig config;
  config.max_extensions = 0;
  const ReplayReport r = run_replay(config, 20.0, load_frames("vru_30fps.jsonl"));
  EXPECT_TRUE(r.commands.empty());
}

TEST(RunReplay, GoldenTimeoutTrace) {
  ControllerConfig config;
  config.tick_s = 1.0;
  const ReplayReport r = run_replay(config, 16.0, load_frames("timeout_1hz.jsonl"));
  std::string log;
  for (const auto& c : r.commands) log += format_command_line(c) + "\n";
  EXPECT_EQ(log, load_text("timeout_1hz.commands.jsonl"));
  std::string trace;
  for (const auto& t : r.trace) trace += format_trace_line(t) + "\n";
  EXPECT_EQ(trace, load_text("timeout_1hz.trace.jsonl"));
  EXPECT_DOUBLE_EQ(r.final_duration_s, 22.0);
  EXPECT_DOUBLE_EQ(r.final_time_left_s, 0.0);
}

TEST(RunReplay, ReplayIsDeterministic) {
  const auto frames = load_frames("timeout_1hz.jsonl");
  const ReplayReport a = run_replay({}, 16.0, frames);
  const ReplayReport b = run_replay({}, 16.0, frames);
  ASSERT_EQ(a.commands.size(), b.commands.size());
  for (std::size_t i = 0; i < a.commands.size(); ++i) {
    EXPECT_EQ(a.commands[i].frame_index, b.commands[i].frame_index);
    EXPECT_EQ(a.commands[i].command, b.commands[i].command);
  }
}

}  // namespace
}  // namespace nplb
