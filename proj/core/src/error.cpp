#include "nplb/error.hpp"

#include <fmt/format.h>

namespace nplb {

ParseError::ParseError(const std::string& message, std::size_t line)
    : Error(line == 0 ? message : fmt::format("line {}: {}", line, message)),
      line_(line) {}

CalibrationError::CalibrationError(const std::string& message, double cv_low,
                                   double cv_high, double rate_low,
                                   double rate_high)
    : Error(fmt::format("{} (CV bracket [{}, {}] gives rates [{:.6g}, {:.6g}])",
                        message, cv_low, cv_high, rate_low, rate_high)),
      cv_low_(cv_low),
      cv_high_(cv_high),
      rate_low_(rate_low),
      rate_high_(rate_high) {}

}  // namespace nplb
