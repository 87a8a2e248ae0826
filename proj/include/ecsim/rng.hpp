#pragma once

#include <cstdint>
#include <random>

namespace ecsim {

/// Seeded generator with portable draws. The standard distributions are
/// implementation-defined, so uniform and exponential variates are derived
/// here from raw 64-bit engine output.
class Rng {
public:
  explicit Rng(std::uint64_t seed);

  /// Independent generator for a named purpose (placement, traffic, ...).
  static Rng stream(std::uint64_t seed, std::uint64_t stream_index);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t index(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }
  /// Exponential variate with the given rate (> 0).
  double exponential(double rate);

private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace ecsim
