#pragma once

#include <stdexcept>
#include <string>

namespace nplb {

// Root of every error the toolkit throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration values or unparseable config text.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input documents (JSON, JSONL, label lines).
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line = 0);

  // 1-based line number, 0 when the input is not line oriented.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Replay frames whose indices do not strictly increase.
class StreamOrderError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  CalibrationError(const std::string& message, double cv_low, double cv_high,
                   double rate_low, double rate_high);

  double cv_low() const noexcept { return cv_low_; }
  double cv_high() const noexcept { return cv_high_; }
  double rate_low() const noexcept { return rate_low_; }
  double rate_high() const noexcept { return rate_high_; }

 private:
  double cv_low_;
  double cv_high_;
  double rate_low_;
  double rate_high_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nplb
