#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace vagnn {

// Named sub-streams derived from the single root seed. Components draw from
// independent streams so changing, say, the negative sampler does not perturb
// parameter initialization.
enum class RngStream : std::uint64_t {
  kInit = 1,
  kWalks = 2,
  kNegatives = 3,
  kShuffle = 4,
  kSynth = 5,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// salt distinguishes repeated uses of one stream (e.g. walk resampling rounds).
inline std::mt19937_64 make_rng(std::uint64_t root_seed, RngStream stream, std::uint64_t salt = 0) {
  std::uint64_t s = splitmix64(root_seed ^ splitmix64(static_cast<std::uint64_t>(stream)));
  s = splitmix64(s ^ splitmix64(salt));
  return std::mt19937_64(s);
}

// Hand-rolled draws: std:: distributions are implementation-defined, and seeded
// outputs here must be stable across standard libraries.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t x = rng();
    if (x >= threshold) return x % n;
  }
}

inline double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double sample_normal(std::mt19937_64& rng) {
  double u1 = uniform_unit(rng);
  while (u1 == 0.0) u1 = uniform_unit(rng);
  const double u2 = uniform_unit(rng);
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace vagnn
