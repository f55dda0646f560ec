#include "nplb/config.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <system_error>

#include <fmt/format.h>

#include "nplb/error.hpp"

namespace nplb {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw ConfigError(fmt::format("key '{}': cannot parse '{}' as a number", key, text));
  }
  return value;
}

using Setter = std::function<void(Settings&, std::string_view, std::string_view)>;
using Getter = std::function<std::string(const Settings&)>;

struct Field {
  Setter set;
  Getter get;
};

template <typename T, typename Access>
Field make_field(Access access) {
  return Field{
      [access](Settings& s, std::string_view key, std::string_view v) {
        access(s) = parse_number<T>(key, v);
      },
      [access](const Settings& s) {
        return fmt::format("{}", access(s));
      },
  };
}

const std::map<std::string, Field, std::less<>>& fields() {
  static const std::map<std::string, Field, std::less<>> table = {
      {"n_trials", make_field<std::int64_t>([](auto& s) -> auto& { return s.sim.n_trials; })},
      {"seed", make_field<std::uint64_t>([](auto& s) -> auto& { return s.sim.seed; })},
      {"alpha", make_field<double>([](auto& s) -> auto& { return s.sim.alpha; })},
      {"detection_map_50", make_field<double>([](auto& s) -> auto& { return s.sim.detection_map_50; })},
      {"p_general", make_field<double>([](auto& s) -> auto& { return s.sim.demographics.p_general; })},
      {"p_elderly", make_field<double>([](auto& s) -> auto& { return s.sim.demographics.p_elderly; })},
      {"p_wheelchair", make_field<double>([](auto& s) -> auto& { return s.sim.demographics.p_wheelchair; })},
      {"coefficient_of_variation",
       make_field<double>([](auto& s) -> auto& { return s.sim.speed_model.coefficient_of_variation; })},
      {"floor_fraction", make_field<double>([](auto& s) -> auto& { return s.sim.speed_model.floor_fraction; })},
      {"design_speed", make_field<double>([](auto& s) -> auto& { return s.sim.policy.design_speed_fps; })},
      {"buffer_s", make_field<double>([](auto& s) -> auto& { return s.sim.policy.buffer_s; })},
      {"extension_s", make_field<double>([](auto& s) -> auto& { return s.sim.controller.extension_s; })},
      {"threshold_s", make_field<double>([](auto& s) -> auto& { return s.sim.controller.threshold_s; })},
      {"max_extensions", make_field<int>([](auto& s) -> auto& { return s.sim.controller.max_extensions; })},
      {"timeout_frames", make_field<int>([](auto& s) -> auto& { return s.sim.controller.timeout_frames; })},
      {"tick_s", make_field<double>([](auto& s) -> auto& { return s.sim.controller.tick_s; })},
      {"initial_signal_s", make_field<double>([](auto& s) -> auto& { return s.initial_signal_s; })},
  };
  return table;
}

}  // namespace

std::vector<KeyValue> parse_key_values(std::string_view text, std::string_view source) {
  std::vector<KeyValue> entries;
  std::size_t line_number = 0;
  while (!text.empty()) {
    const auto newline = text.find('\n');
    std::string_view line = text.substr(0, newline);
    text = newline == std::string_view::npos ? std::string_view{} : text.substr(newline + 1);
    ++line_number;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("{}:{}: expected 'key = value', got '{}'", source, line_number, line));
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(fmt::format("{}:{}: missing key", source, line_number));
    if (value.empty()) {
      throw ConfigError(fmt::format("{}:{}: key '{}' has no value", source, line_number, key));
    }
    entries.push_back({std::string(key), std::string(value), line_number});
  }
  return entries;
}

void apply_setting(Settings& settings, std::string_view key, std::string_view value) {
  const auto& table = fields();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError(fmt::format("unknown key '{}'", key));
  it->second.set(settings, key, trim(value));
}

void apply_key_values(Settings& settings, const std::vector<KeyValue>& entries,
                      std::string_view source) {
  for (const KeyValue& kv : entries) {
    try {
      apply_setting(settings, kv.key, kv.value);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("{}:{}: {}", source, kv.line, e.what()));
    }
  }
}

std::string to_key_values(const Settings& settings) {
  std::string out;
  for (const auto& [key, f] : fields()) out += fmt::format("{} = {}\n", key, f.get(settings));
  return out;
}

std::vector<std::string> setting_keys() {
  std::vector<std::string> keys;
  for (const auto& [key, f] : fields()) keys.push_back(key);
  return keys;
}

}  // namespace nplb
