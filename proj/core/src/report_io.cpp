#include "nplb/report_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "nplb/error.hpp"
#include "number_format.hpp"

namespace nplb {
namespace {

using ordered_json = nlohmann::ordered_json;
using detail::round_sig6;
using detail::sig6;

ordered_json arm_json(const ArmStats& arm) {
  ordered_json j;
  j["stranding_rate"] = round_sig6(arm.stranding_rate);
  j["se"] = round_sig6(arm.se);
  j["duration_mean"] = round_sig6(arm.duration_mean);
  j["duration_median"] = round_sig6(arm.duration_median);
  j["duration_max"] = round_sig6(arm.duration_max);
  return j;
}

std::string arm_row(std::string_view mode, const ArmStats& arm) {
  return fmt::format("{},{},{},{},{},{}\n", mode, sig6(arm.stranding_rate), sig6(arm.se),
                     sig6(arm.duration_mean), sig6(arm.duration_median), sig6(arm.duration_max));
}

}  // namespace

std::string to_json(const SimReport& report) {
  ordered_json j;
  j["n_trials"] = report.n_trials;
  j["seed"] = report.seed;
  j["fixed"] = arm_json(report.fixed);
  j["nplb"] = arm_json(report.nplb);
  j["improvement_pct"] = round_sig6(report.improvement_pct);
  j["extension_histogram"] = report.extension_histogram;
  return j.dump(2) + "\n";
}

std::string to_csv(const SimReport& report) {
  std::string out = "mode,stranding_rate,se,duration_mean,duration_median,duration_max\n";
  out += arm_row("fixed", report.fixed);
  out += arm_row("nplb", report.nplb);
  return out;
}

std::string histogram_csv(const SimReport& report) {
  std::string out = "k,trials\n";
  for (std::size_t k = 0; k < report.extension_histogram.size(); ++k) {
    out += fmt::format("{},{}\n", k, report.extension_histogram[k]);
  }
  return out;
}

std::string to_csv(const SweepGrid& grid) {
  std::string out = "tau_e,tau_t,stranding_rate,mean_extensions,mean_duration\n";
  for (const SweepCell& c : grid.cells) {
    out += fmt::format("{},{},{},{},{}\n", sig6(c.tau_e), sig6(c.tau_t), sig6(c.stranding_rate),
                       sig6(c.mean_extensions), sig6(c.mean_duration));
  }
  return out;
}

std::string to_json(const SweepGrid& grid) {
  ordered_json j;
  j["tau_e_values"] = ordered_json::array();
  for (double v : grid.tau_e_values) j["tau_e_values"].push_back(round_sig6(v));
  j["tau_t_values"] = ordered_json::array();
  for (double v : grid.tau_t_values) j["tau_t_values"].push_back(round_sig6(v));
  j["cells"] = ordered_json::array();
  for (const SweepCell& c : grid.cells) {
    ordered_json cell;
    cell["tau_e"] = round_sig6(c.tau_e);
    cell["tau_t"] = round_sig6(c.tau_t);
    cell["stranding_rate"] = round_sig6(c.stranding_rate);
    cell["mean_extensions"] = round_sig6(c.mean_extensions);
    cell["mean_duration"] = round_sig6(c.mean_duration);
    j["cells"].push_back(std::move(cell));
  }
  return j.dump(2) + "\n";
}

std::string to_json(const CalibrationResult& result) {
  ordered_json j;
  // Bisection midpoints are dyadic; keep every digit so the value can be
  // pasted back into a config unchanged.
  j["coefficient_of_variation"] = result.coefficient_of_variation;
  j["achieved_rate"] = round_sig6(result.achieved_rate);
  j["target_rate"] = round_sig6(result.target_rate);
  j["tolerance"] = round_sig6(result.tolerance);
  j["evaluations"] = result.evaluations;
  return j.dump(2) + "\n";
}

std::string render(const SimReport& report, ReportFormat format) {
  return format == ReportFormat::Json ? to_json(report) : to_csv(report);
}

std::string render(const SweepGrid& grid, ReportFormat format) {
  return format == ReportFormat::Json ? to_json(grid) : to_csv(grid);
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      throw IoError(fmt::format("cannot create {}: {}", path.parent_path().string(), ec.message()));
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open {} for writing", path.string()));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError(fmt::format("failed writing {}", path.string()));
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace nplb
