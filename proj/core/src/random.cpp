#include "nplb/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>

namespace nplb {
namespace {

std::uint32_t lo32(std::uint64_t v) { return static_cast<std::uint32_t>(v); }
std::uint32_t hi32(std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); }

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) {
  std::seed_seq seq{lo32(seed), hi32(seed)};
  engine_.seed(seq);
}

RandomStream RandomStream::for_trial(std::uint64_t seed, std::uint64_t trial,
                                     StreamTag tag) {
  std::seed_seq seq{lo32(seed), hi32(seed), lo32(trial), hi32(trial),
                    static_cast<std::uint32_t>(tag)};
  return RandomStream(std::mt19937_64(seq));
}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double normal_quantile(double p) {
  constexpr double kMin = std::numeric_limits<double>::min();
  constexpr double kMax = 1.0 - 0x1.0p-53;
  if (p < kMin) p = kMin;
  if (p > kMax) p = kMax;
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

}  // namespace nplb
