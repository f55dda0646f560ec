#include <filesystem>

#include <gtest/gtest.h>
#include <json.hpp>

#include "nplb/error.hpp"
#include "nplb/report_io.hpp"

namespace nplb {
namespace {

SimReport sample_report() {
  SimReport r;
  r.n_trials = 10000;
  r.seed = 42;
  r.fixed = {0.0919, 0.00288831, 17.3456789, 17.1428571, 22.1428571};
  r.nplb = {0.0531, 0.00224183, 17.9123456, 17.5, 28.1428571};
  r.improvement_pct = 42.2198041;
  r.extension_histogram = {8160, 720, 1120};
  return r;
}

TEST(ReportJson, KeysAndOrder) {
  const auto j = nlohmann::ordered_json::parse(to_json(sample_report()));
  std::vector<std::string> keys;
  for (const auto& item : j.items()) keys.push_back(item.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"n_trials", "seed", "fixed", "nplb", "improvement_pct",
                                            "extension_histogram"}));
  std::vector<std::string> arm;
  for (const auto& item : j["fixed"].items()) arm.push_back(item.key());
  EXPECT_EQ(arm, (std::vector<std::string>{"stranding_rate", "se", "duration_mean", "duration_median",
                                           "duration_max"}));
  EXPECT_EQ(j["n_trials"], 10000);
  EXPECT_EQ(j["extension_histogram"], nlohmann::json::parse("[8160, 720, 1120]"));
}

TEST(ReportJson, SixSignificantDigits) {
  const auto j = nlohmann::json::parse(to_json(sample_report()));
  EXPECT_DOUBLE_EQ(j["fixed"]["duration_mean"].get<double>(), 17.3457);
  EXPECT_DOUBLE_EQ(j["improvement_pct"].get<double>(), 42.2198);
  EXPECT_DOUBLE_EQ(j["nplb"]["duration_max"].get<double>(), 28.1429);
}

TEST(ReportCsv, HeaderAndRows) {
  const std::string csv = to_csv(sample_report());
  EXPECT_EQ(csv,
            "mode,stranding_rate,se,duration_mean,duration_median,duration_max\n"
            "fixed,0.0919,0.00288831,17.3457,17.1429,22.1429\n"
            "nplb,0.0531,0.00224183,17.9123,17.5,28.1429\n");
  EXPECT_EQ(histogram_csv(sample_report()), "k,trials\n0,8160\n1,720\n2,1120\n");
  EXPECT_EQ(render(sample_report(), ReportFormat::Csv), csv);
}

TEST(SweepCsv, HeaderAndRowOrder) {
  SweepGrid g;
  g.tau_e_values = {3.0, 3.5};
  g.tau_t_values = {4.0};
  g.cells = {{3.0, 4.0, 0.05, 0.3, 17.5}, {3.5, 4.0, 0.04, 0.31, 17.6}};
  EXPECT_EQ(to_csv(g),
            "tau_e,tau_t,stranding_rate,mean_extensions,mean_duration\n"
            "3,4,0.05,0.3,17.5\n"
            "3.5,4,0.04,0.31,17.6\n");
  const auto j = nlohmann::json::parse(to_json(g));
  EXPECT_EQ(j["cells"].size(), 2u);
}

TEST(CalibrationJson, KeepsFullPrecisionCv) {
  const CalibrationResult r{0.1234567890123, 0.0911, 0.091, 0.002, 7};
  const auto j = nlohmann::json::parse(to_json(r));
  EXPECT_EQ(j["coefficient_of_variation"].get<double>(), 0.1234567890123);
  EXPECT_EQ(j["evaluations"], 7);
}

TEST(TextFiles, RoundTripAndErrors) {
  const auto dir = std::filesystem::temp_directory_path() / "nplb_report_io_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  const auto path = dir / "out.txt";
  write_text_file(path, "a\nb\n");
  EXPECT_EQ(read_text_file(path), "a\nb\n");
  EXPECT_THROW(read_text_file(dir / "missing.txt"), IoError);
  std::filesystem::remove_all(dir.parent_path());
}

}  // namespace
}  // namespace nplb
