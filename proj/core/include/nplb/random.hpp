#pragma once

#include <cstdint>
#include <random>

namespace nplb {

/// Purpose of a per-trial substream. Distinct tags give independent streams
/// for the same (seed, trial) pair.
enum class StreamTag : std::uint32_t {
  Scenario = 1,
  Detection = 2,
};

/// Deterministic random stream. Output depends only on the seed material,
/// never on the standard library's distribution implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  /// Substream for trial `trial` of a run seeded with `seed`.
  static RandomStream for_trial(std::uint64_t seed, std::uint64_t trial, StreamTag tag);

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();

  std::uint64_t next_u64() { return engine_(); }

 private:
  explicit RandomStream(std::mt19937_64 engine) : engine_(engine) {}

  std::mt19937_64 engine_;
};

/// Standard normal quantile.
double normal_quantile(double p);

/// Standard normal CDF.
double normal_cdf(double z);

}  // namespace nplb
