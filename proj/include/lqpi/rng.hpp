#pragma once

#include <cmath>
#include <cstdint>

namespace lqpi {

// Counter-based Gaussian stream. Every draw is a pure function of
// (seed, path, step, which), so path i is identical no matter how many
// paths are sampled or how the work is partitioned across workers.
namespace rng {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                                  std::uint64_t which) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ path);
  h = mix64(h ^ step);
  h = mix64(h ^ which);
  return h;
}

// uniform in (0, 1]
inline double to_unit(std::uint64_t h) {
  return (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
}

// one standard normal per counter, Box-Muller (cosine branch)
inline double normal(std::uint64_t seed, std::uint64_t path, std::uint64_t step,
                     std::uint64_t which) {
  const std::uint64_t h1 = counter_hash(seed, path, step, which);
  const std::uint64_t h2 = mix64(h1 ^ 0xd1b54a32d192ed03ULL);
  const double u1 = to_unit(h1);
  const double u2 = to_unit(h2);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

// uniform in [lo, hi), for scenario generation
inline double uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c,
                      double lo, double hi) {
  return lo + (hi - lo) * (to_unit(counter_hash(seed, a, b, c)) - 0x1.0p-53);
}

}  // namespace rng
}  // namespace lqpi
