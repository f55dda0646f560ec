#pragma once

#include <cstdlib>
#include <string>

#include <fmt/format.h>

namespace nplb::detail {

// Text form with 6 significant digits.
inline std::string sig6(double value) { return fmt::format("{:.6g}", value); }

// Value whose shortest round-trip text has at most 6 significant digits, so
// JSON serializers print it the same way sig6() does.
inline double round_sig6(double value) {
  return std::strtod(sig6(value).c_str(), nullptr);
}

}  // namespace nplb::detail
