#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "commands.hpp"
#include "nplb/error.hpp"

namespace {

using nplb::cli::CommonOptions;

// Registers a flag whose value, when given, overrides config key `key`.
void setting_flag(CLI::App* app, CommonOptions& options, const std::string& flag, const std::string& key,
                  const std::string& help) {
  app->add_option_function<std::string>(
      flag, [&options, key](const std::string& value) { options.overrides[key] = value; }, help);
}

void add_common(CLI::App* app, CommonOptions& options) {
  app->add_option("--config", options.config_path, "Flat key = value config file");
  app->add_option("--out", options.out_dir, "Output directory")->capture_default_str();
  app->add_option("--threads", options.threads, "Worker threads (0 = all cores)")->capture_default_str();
  app->add_option("--set", options.set_pairs, "Override any config key: --set key=value");
  setting_flag(app, options, "--seed", "seed", "Run seed");
  setting_flag(app, options, "--trials", "n_trials", "Monte Carlo trials");
}

void add_controller_flags(CLI::App* app, CommonOptions& options, bool with_grid_taus) {
  if (!with_grid_taus) {
    setting_flag(app, options, "--tau-e", "extension_s", "Extension per grant (s)");
    setting_flag(app, options, "--tau-t", "threshold_s", "Remaining-time trigger (s)");
  }
  setting_flag(app, options, "--n-max", "max_extensions", "Maximum extensions per cycle");
  setting_flag(app, options, "--timeout-frames", "timeout_frames", "VRU-free frames before the ID set clears");
  setting_flag(app, options, "--tick", "tick_s", "Seconds per frame");
}

void add_model_flags(CLI::App* app, CommonOptions& options) {
  setting_flag(app, options, "--alpha", "alpha", "Per-frame miss probability");
  setting_flag(app, options, "--cv", "coefficient_of_variation", "Walking-speed coefficient of variation");
  setting_flag(app, options, "--design-speed", "design_speed", "Fixed-time design speed (ft/s)");
  setting_flag(app, options, "--buffer", "buffer_s", "Fixed-time buffer (s)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive pedestrian-signal controller and Monte Carlo evaluation toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", NPLB_VERSION);

  CommonOptions options;
  int status = nplb::cli::kOk;

  auto* simulate = app.add_subcommand("simulate", "Fixed-time vs adaptive stranding comparison");
  add_common(simulate, options);
  add_model_flags(simulate, options);
  add_controller_flags(simulate, options, false);

  nplb::cli::GridSpec grid;
  auto* sweep = app.add_subcommand("sweep", "Stranding rate over a tau_e x tau_t grid");
  add_common(sweep, options);
  add_model_flags(sweep, options);
  add_controller_flags(sweep, options, true);
  sweep->add_option("--tau-e", grid.tau_e, "Extension grid: first..last:step or a,b,c")->capture_default_str();
  sweep->add_option("--tau-t", grid.tau_t, "Threshold grid: first..last:step or a,b,c")->capture_default_str();

  double target = 0.091;
  double tolerance = 0.002;
  auto* calibrate = app.add_subcommand("calibrate", "Fit the walking-speed CV to a fixed-time stranding rate");
  add_common(calibrate, options);
  add_model_flags(calibrate, options);
  calibrate->add_option("--target", target, "Target fixed-time stranding rate")->capture_default_str();
  calibrate->add_option("--tolerance", tolerance, "Accepted absolute error")->capture_default_str();

  std::filesystem::path frames;
  bool trace = false;
  auto* replay = app.add_subcommand("replay", "Run the controller over a JSONL frame stream");
  add_common(replay, options);
  add_controller_flags(replay, options, false);
  replay->add_option("frames", frames, "Line-delimited detection frames")->required();
  setting_flag(replay, options, "--initial", "initial_signal_s", "Initial pedestrian phase (s)");
  replay->add_flag("--trace", trace, "Also write the per-frame state trace");

  std::filesystem::path coco_dir;
  auto* convert = app.add_subcommand("convert", "COCO annotations to YOLO labels with count validation");
  add_common(convert, options);
  convert->add_option("coco_dir", coco_dir, "Directory holding <split>/annotations.json")->required();
  convert->add_option("out_dir", options.out_dir, "Output directory (same as --out)");

  std::filesystem::path predictions;
  std::filesystem::path ground_truth;
  std::optional<int> n_classes;
  bool include_vacuous = false;
  auto* evaldet = app.add_subcommand("evaldet", "IoU-matched AP, mAP@0.5 and mAP@[0.5:0.95]");
  add_common(evaldet, options);
  evaldet->add_option("predictions", predictions, "Prediction JSONL")->required();
  evaldet->add_option("ground_truth", ground_truth, "Ground-truth JSONL")->required();
  evaldet->add_option("--n-classes", n_classes, "Evaluate classes 0..n-1");
  evaldet->add_flag("--include-vacuous", include_vacuous, "Count classes with no data (AP 1) in mAP");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : nplb::cli::kConfigError;
  }

  try {
    if (*simulate) status = nplb::cli::cmd_simulate(options);
    if (*sweep) status = nplb::cli::cmd_sweep(options, grid);
    if (*calibrate) status = nplb::cli::cmd_calibrate(options, target, tolerance);
    if (*replay) status = nplb::cli::cmd_replay(options, frames, trace);
    if (*convert) status = nplb::cli::cmd_convert(options, coco_dir);
    if (*evaldet) status = nplb::cli::cmd_evaldet(options, predictions, ground_truth, n_classes, include_vacuous);
  } catch (const nplb::ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return nplb::cli::kConfigError;
  } catch (const nplb::ParseError& e) {
    fmt::print(stderr, "input error: {}\n", e.what());
    return nplb::cli::kConfigError;
  } catch (const nplb::CalibrationError& e) {
    fmt::print(stderr, "calibration failed: {}\n", e.what());
    return nplb::cli::kCalibrationFailure;
  } catch (const nplb::ValidationError& e) {
    fmt::print(stderr, "validation failed: {}\n", e.what());
    return nplb::cli::kValidationFailure;
  } catch (const nplb::StreamOrderError& e) {
    fmt::print(stderr, "stream order error: {}\n", e.what());
    return nplb::cli::kValidationFailure;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return nplb::cli::kIoFailure;
  }
  return status;
}
