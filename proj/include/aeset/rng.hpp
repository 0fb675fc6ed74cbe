#pragma once

#include <complex>
#include <cstdint>

namespace aeset {

/// Identifies one reproducible random stream.
///
/// Identical (seed, stream) pairs reproduce identical draws bit for bit on
/// every platform: the generator below uses only integer arithmetic and the
/// IEEE-754 `log`, `sqrt`, `cos` and `sin` of the Box-Muller transform.
struct RunSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  /// Derives an independent child stream, e.g. one per restart or per sample.
  RunSeed child(std::uint64_t index) const;

  friend bool operator==(const RunSeed&, const RunSeed&) = default;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Counter-based generator.
///
/// The key is `mix64(seed ^ mix64(stream + golden))` and draw number `i`
/// (starting at 0) is `mix64(key + (i + 1) * golden)` with
/// `golden = 0x9E3779B97F4A7C15`. Any draw can be computed without touching
/// the previous ones, so streams can be split freely across threads.
class CounterRng {
 public:
  explicit CounterRng(RunSeed seed);

  std::uint64_t next_u64();

  /// Uniform on (0, 1], 53-bit resolution.
  double uniform_open_zero();
  /// Uniform on [0, 1), 53-bit resolution.
  double uniform();

  /// Standard normal pair from one Box-Muller transform, packed as re/im.
  std::complex<double> normal_pair();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace aeset
