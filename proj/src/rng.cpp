#include "ecsim/rng.hpp"

#include <cmath>

namespace ecsim {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

Rng Rng::stream(std::uint64_t seed, std::uint64_t stream_index) {
  return Rng(splitmix64(seed) ^ splitmix64(stream_index * 0xD1B54A32D192ED03ULL + 1));
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::index(std::uint64_t n) {
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x = engine_();
  while (x >= limit) x = engine_();
  return x % n;
}

double Rng::exponential(double rate) {
  return -std::log1p(-uniform()) / rate;
}

}  // namespace ecsim
