#pragma once

#include <cstdint>
#include <random>

#include "gmsphere/quat.hpp"

namespace gmsphere {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; decorrelates nearby seeds such as seed ^ index.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

inline double gaussian(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }
inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Quaternion gaussian_quaternion(Rng& rng) {
  const double w = gaussian(rng), x = gaussian(rng), y = gaussian(rng), z = gaussian(rng);
  return {w, x, y, z};
}

inline ImQuaternion gaussian_imaginary(Rng& rng) {
  const double x = gaussian(rng), y = gaussian(rng), z = gaussian(rng);
  return {x, y, z};
}

inline Quaternion random_unit_quaternion(Rng& rng) {
  for (;;) {
    const Quaternion q = gaussian_quaternion(rng);
    if (q.norm2() > 1e-12) return q.normalized();
  }
}

inline ImQuaternion random_unit_imaginary(Rng& rng) {
  for (;;) {
    const ImQuaternion v = gaussian_imaginary(rng);
    if (v.norm2() > 1e-12) return v * (1.0 / v.norm());
  }
}

}  // namespace gmsphere
