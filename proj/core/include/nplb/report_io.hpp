#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "nplb/montecarlo.hpp"

namespace nplb {

enum class ReportFormat { Csv, Json };

/// {"n_trials", "seed", "fixed": {...}, "nplb": {...}, "improvement_pct",
///  "extension_histogram": [...]}; floats carry 6 significant digits.
std::string to_json(const SimReport& report);

/// mode,stranding_rate,se,duration_mean,duration_median,duration_max
std::string to_csv(const SimReport& report);

/// k,trials
std::string histogram_csv(const SimReport& report);

/// tau_e,tau_t,stranding_rate,mean_extensions,mean_duration
std::string to_csv(const SweepGrid& grid);
std::string to_json(const SweepGrid& grid);

std::string to_json(const CalibrationResult& result);

std::string render(const SimReport& report, ReportFormat format);
std::string render(const SweepGrid& grid, ReportFormat format);

/// Writes `content` verbatim, creating parent directories. Throws IoError.
void write_text_file(const std::filesystem::path& path, std::string_view content);

std::string read_text_file(const std::filesystem::path& path);

}  // namespace nplb
