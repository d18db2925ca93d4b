#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace empcal {

/// Stateless 64-bit finalizer (splitmix64). Used to derive stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Purpose tags for deriving independent substreams within one iteration.
enum class StreamTag : std::uint64_t {
  Coefficients = 1,
  Confounders = 2,
  Unmeasured = 3,
  Treatment = 4,
  OutcomeOfInterest = 5,
  NegativeControl = 6,
  MeasurementError = 7,
  PositiveControl = 8,
  Optimizer = 9,
};

/// A random stream with a fixed, platform-independent sequence for a given
/// seed. Streams for different (seed, path) pairs are derived by hashing, so
/// the draws consumed by one iteration never depend on scheduling.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Stream keyed by `seed` and a path of indices, e.g. {iteration, tag, s}.
  static RandomStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double low, double high) { return low + (high - low) * uniform(); }
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  /// Inverse-CDF Bernoulli: true iff a fresh uniform falls below p, so two
  /// probabilities evaluated on the same stream state are ordered.
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace empcal
