#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <fstream>
#include <iostream>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "nplb/annotations.hpp"
#include "nplb/controller.hpp"
#include "nplb/detmetrics.hpp"
#include "nplb/error.hpp"
#include "nplb/montecarlo.hpp"
#include "nplb/replay_io.hpp"
#include "nplb/report_io.hpp"

#ifndef NPLB_VERSION
#define NPLB_VERSION "dev"
#endif

namespace nplb::cli {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

// Writes outputs under the run directory and, on finish(), the resolved
// config snapshot plus a manifest listing everything produced.
class RunRecorder {
 public:
  RunRecorder(std::string subcommand, const CommonOptions& options, const Settings& settings)
      : subcommand_(std::move(subcommand)),
        options_(options),
        settings_(settings),
        started_(std::chrono::steady_clock::now()) {}

  void output(const fs::path& relative, std::string_view content) {
    write_text_file(options_.out_dir / relative, content);
    outputs_.push_back(relative.generic_string());
  }

  void input(const fs::path& path) { inputs_.push_back(path.generic_string()); }

  void finish() {
    const std::string snapshot_name = subcommand_ + "_config.txt";
    const std::string snapshot = to_key_values(settings_);
    write_text_file(options_.out_dir / snapshot_name, snapshot);

    ordered_json m;
    m["tool"] = "nplb";
    m["version"] = NPLB_VERSION;
    m["subcommand"] = subcommand_;
    m["seed"] = settings_.sim.seed;
    m["threads"] = options_.threads;
    m["config_snapshot"] = snapshot_name;
    ordered_json config = ordered_json::object();
    for (const KeyValue& kv : parse_key_values(snapshot)) config[kv.key] = kv.value;
    m["config"] = std::move(config);
    m["inputs"] = inputs_;
    m["outputs"] = outputs_;
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started_;
    m["wall_clock_s"] = elapsed.count();
    write_text_file(options_.out_dir / (subcommand_ + "_manifest.json"), m.dump(2) + "\n");
  }

 private:
  std::string subcommand_;
  const CommonOptions& options_;
  const Settings& settings_;
  std::chrono::steady_clock::time_point started_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
};

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ConfigError(fmt::format("cannot parse '{}' as a number", text));
  }
  return value;
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  return in;
}

}  // namespace

Settings resolve_settings(const CommonOptions& options) {
  Settings settings;
  if (options.config_path) {
    const std::string text = read_text_file(*options.config_path);
    apply_key_values(settings, parse_key_values(text, *options.config_path), *options.config_path);
  }
  for (const std::string& pair : options.set_pairs) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("--set expects key=value, got '{}'", pair));
    apply_setting(settings, pair.substr(0, eq), pair.substr(eq + 1));
  }
  for (const auto& [key, value] : options.overrides) {
    try {
      apply_setting(settings, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("flag for '{}': {}", key, e.what()));
    }
  }
  return settings;
}

std::vector<double> parse_grid(const std::string& text) {
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const auto colon = text.find(':', dots);
    if (colon == std::string::npos) {
      throw ConfigError(fmt::format("grid '{}' needs a step: first..last:step", text));
    }
    return linear_grid(parse_double(text.substr(0, dots)),
                       parse_double(text.substr(dots + 2, colon - dots - 2)),
                       parse_double(text.substr(colon + 1)));
  }
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    values.push_back(parse_double(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return values;
}

int cmd_simulate(const CommonOptions& options) {
  const Settings settings = resolve_settings(options);
  RunRecorder run("simulate", options, settings);

  const SimReport report = run_comparison(settings.sim, options.threads);
  run.output("simulate_report.json", to_json(report));
  run.output("simulate_report.csv", to_csv(report));
  run.output("extension_histogram.csv", histogram_csv(report));
  run.finish();

  fmt::print("fixed stranding {:.2f}% (se {:.2f})  nplb stranding {:.2f}% (se {:.2f})  improvement {:.1f}%\n",
             100 * report.fixed.stranding_rate, 100 * report.fixed.se, 100 * report.nplb.stranding_rate,
             100 * report.nplb.se, report.improvement_pct);
  std::string hist;
  for (std::size_t k = 0; k < report.extension_histogram.size(); ++k) {
    hist += fmt::format(" k={}: {:.1f}%", k,
                        100.0 * static_cast<double>(report.extension_histogram[k]) /
                            static_cast<double>(report.n_trials));
  }
  fmt::print("extensions:{}\n", hist);
  return kOk;
}

int cmd_sweep(const CommonOptions& options, const GridSpec& grid_spec) {
  const Settings settings = resolve_settings(options);
  const std::vector<double> tau_e = parse_grid(grid_spec.tau_e);
  const std::vector<double> tau_t = parse_grid(grid_spec.tau_t);
  RunRecorder run("sweep", options, settings);

  const SweepGrid grid = parameter_sweep(settings.sim, tau_e, tau_t, options.threads);
  run.output("sweep.csv", to_csv(grid));
  run.finish();
  fmt::print("{} cells ({} tau_e x {} tau_t) written to {}\n", grid.cells.size(), tau_e.size(),
             tau_t.size(), (options.out_dir / "sweep.csv").string());
  return kOk;
}

int cmd_calibrate(const CommonOptions& options, double target, double tolerance) {
  const Settings settings = resolve_settings(options);
  RunRecorder run("calibrate", options, settings);
  const CalibrationResult result = calibrate_speed_cv(settings.sim, target, tolerance, options.threads);
  run.output("calibration.json", to_json(result));
  run.finish();
  fmt::print("coefficient_of_variation = {}\n# fixed stranding {:.4f} (target {} +/- {}), {} evaluations\n",
             result.coefficient_of_variation, result.achieved_rate, target, tolerance, result.evaluations);
  return kOk;
}

int cmd_replay(const CommonOptions& options, const fs::path& frames_path, bool write_trace) {
  const Settings settings = resolve_settings(options);
  std::ifstream in = open_input(frames_path);
  const std::vector<DetectionFrame> frames = read_frames(in);

  RunRecorder run("replay", options, settings);
  run.input(frames_path);
  const ReplayReport report = run_replay(settings.sim.controller, settings.initial_signal_s, frames);

  std::string log;
  for (const CommandRecord& c : report.commands) log += format_command_line(c) + "\n";
  run.output("commands.jsonl", log);
  if (write_trace) {
    std::string trace;
    for (const FrameTrace& t : report.trace) trace += format_trace_line(t) + "\n";
    run.output("trace.jsonl", trace);
  }
  run.output("replay_summary.json", replay_summary_json(report));
  run.finish();
  fmt::print("{} frames, {} extensions, final duration {}s\n", report.trace.size(), report.commands.size(),
             report.final_duration_s);
  return kOk;
}

int cmd_convert(const CommonOptions& options, const fs::path& coco_dir) {
  const Settings settings = resolve_settings(options);
  RunRecorder run("convert", options, settings);

  struct SplitInput {
    std::string name;
    CocoDataset dataset;
    fs::path source_images;
  };
  std::vector<SplitInput> splits;
  for (std::string_view split : kStandardSplits) {
    const fs::path annotations = coco_dir / split / "annotations.json";
    if (!fs::exists(annotations)) continue;
    run.input(annotations);
    splits.push_back({std::string(split), parse_coco(read_text_file(annotations)), coco_dir / split / "images"});
  }
  if (splits.empty()) {
    throw ConfigError(fmt::format("no <split>/annotations.json under {} for splits train, validation, test",
                                  coco_dir.string()));
  }

  // One class mapping across all splits.
  CocoDataset all_categories;
  std::set<std::int64_t> seen;
  for (const SplitInput& s : splits) {
    for (const CocoCategory& c : s.dataset.categories) {
      if (seen.insert(c.id).second) all_categories.categories.push_back(c);
    }
  }
  const CategoryIndexMap id_map = default_id_map(all_categories);
  const std::vector<std::string> names = class_names(all_categories, id_map);

  std::vector<SplitLayout> layouts;
  ordered_json summaries = ordered_json::array();
  for (const SplitInput& s : splits) {
    SplitLayout layout{s.name, options.out_dir / s.name / "images", options.out_dir / s.name / "labels", names};
    fs::create_directories(layout.image_dir);
    if (fs::is_directory(s.source_images)) {
      for (const auto& entry : fs::directory_iterator(s.source_images)) {
        if (entry.is_regular_file() && is_image_file(entry.path())) {
          fs::copy_file(entry.path(), layout.image_dir / entry.path().filename(),
                        fs::copy_options::overwrite_existing);
        }
      }
    }
    const ConversionSummary summary = convert_split(s.dataset, layout, id_map);
    ordered_json row;
    row["split"] = summary.split;
    row["images"] = summary.images;
    row["label_files"] = summary.label_files;
    row["objects"] = summary.objects;
    row["per_class_counts"] = summary.per_class_counts;
    summaries.push_back(std::move(row));
    layouts.push_back(std::move(layout));
  }

  run.output("dataset.yaml", dataset_config_text(options.out_dir, layouts, names));
  run.output("conversion_summary.json", summaries.dump(2) + "\n");
  const ValidationReport validation = validate_counts(layouts);
  run.output("validation.json", to_json(validation));
  run.finish();

  for (const SplitValidation& row : validation.rows) {
    fmt::print("{:<11} images {:>6}  labels {:>6}  {}\n", row.split, row.image_count, row.label_count,
               row.ok() ? "ok" : "MISMATCH");
    for (const std::string& stem : row.missing_labels) fmt::print("  missing label: {}\n", stem);
    for (const std::string& stem : row.orphan_labels) fmt::print("  label without image: {}\n", stem);
  }
  return validation.ok() ? kOk : kValidationFailure;
}

int cmd_evaldet(const CommonOptions& options, const fs::path& predictions_path, const fs::path& gt_path,
                std::optional<int> n_classes, bool include_vacuous) {
  const Settings settings = resolve_settings(options);
  std::ifstream pred_in = open_input(predictions_path);
  std::ifstream gt_in = open_input(gt_path);
  const std::vector<Prediction> preds = read_predictions(pred_in);
  const std::vector<GroundTruth> gts = read_ground_truth(gt_in);

  RunRecorder run("evaldet", options, settings);
  run.input(predictions_path);
  run.input(gt_path);
  EvalOptions eval;
  eval.n_classes = n_classes;
  eval.include_vacuous = include_vacuous;
  const EvalResult result = map_over_range(preds, gts, eval);
  run.output("eval.json", to_json(result));
  run.finish();
  fmt::print("mAP@0.5 {:.4f}  mAP@[0.5:0.95] {:.4f}\n", result.map_50, result.map_50_95);
  return kOk;
}

}  // namespace nplb::cli
