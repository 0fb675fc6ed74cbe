#include "aeset/rng.hpp"

#include <cmath>
#include <numbers>

namespace aeset {
namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;
}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RunSeed RunSeed::child(std::uint64_t index) const {
  return RunSeed{mix64(seed ^ mix64(stream + kGolden) ^ 0xA0761D6478BD642FULL),
                 index};
}

CounterRng::CounterRng(RunSeed seed)
    : key_(mix64(seed.seed ^ mix64(seed.stream + kGolden))) {}

std::uint64_t CounterRng::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform_open_zero() {
  return static_cast<double>((next_u64() >> 11) + 1) * kTwoPow53Inv;
}

double CounterRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * kTwoPow53Inv;
}

std::complex<double> CounterRng::normal_pair() {
  const double u1 = uniform_open_zero();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace aeset
