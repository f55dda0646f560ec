#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nplb/config.hpp"

namespace nplb::cli {

enum ExitCode : int {
  kOk = 0,
  kIoFailure = 1,
  kConfigError = 2,
  kValidationFailure = 3,
  kCalibrationFailure = 4,
};

/// Options shared by every subcommand. Setting overrides are kept as text
/// and applied after the config file, so flags win over file values.
struct CommonOptions {
  std::optional<std::string> config_path;
  std::filesystem::path out_dir = "out";
  unsigned threads = 1;
  std::map<std::string, std::string> overrides;
  std::vector<std::string> set_pairs;
};

Settings resolve_settings(const CommonOptions& options);

struct GridSpec {
  std::string tau_e = "3..6:0.5";
  std::string tau_t = "3..6:0.5";
};

/// "a..b:step" or a comma-separated list.
std::vector<double> parse_grid(const std::string& text);

int cmd_simulate(const CommonOptions& options);
int cmd_sweep(const CommonOptions& options, const GridSpec& grid);
int cmd_calibrate(const CommonOptions& options, double target, double tolerance);
int cmd_replay(const CommonOptions& options, const std::filesystem::path& frames, bool write_trace);
int cmd_convert(const CommonOptions& options, const std::filesystem::path& coco_dir);
int cmd_evaldet(const CommonOptions& options, const std::filesystem::path& predictions,
                const std::filesystem::path& ground_truth, std::optional<int> n_classes,
                bool include_vacuous);

}  // namespace nplb::cli
