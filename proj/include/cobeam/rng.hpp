// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The cobeam Authors
#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "cobeam/types.hpp"

namespace cobeam {

/// splitmix64 step; used to derive independent substream seeds from a user
/// seed plus entity indices. The constants are the reference ones.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Mixes a base seed with up to three entity indices into a substream seed.
/// Feeding each index through a full splitmix64 round keeps nearby seeds and
/// indices statistically decorrelated.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a = 0,
                              std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t state = seed;
  std::uint64_t out = splitmix64(state);
  state ^= a + 0x8e9c2f0b6a5d4e3cULL;
  out ^= splitmix64(state);
  state ^= b + 0x1f83d9abfb41bd6bULL;
  out ^= splitmix64(state);
  state ^= c + 0x5be0cd19137e2179ULL;
  out ^= splitmix64(state);
  return out;
}

/// Deterministic random stream: mt19937_64 plus hand-rolled uniform and
/// Box-Muller transforms. The standard library distributions are
/// implementation-defined, so they are avoided for reproducibility; the raw
/// engine output is specified exactly by the C++ standard.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw in (0, 1] with 53-bit resolution (never returns 0, so it
  /// is safe inside logarithms).
  Real uniform() {
    const std::uint64_t bits = engine_() >> 11;  // top 53 bits
    return static_cast<Real>(bits + 1) * 0x1.0p-53;
  }

  /// Standard real normal N(0, 1). Consumes exactly two uniforms per call.
  Real normal() {
    const Real u1 = uniform();
    const Real u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  /// Circularly-symmetric complex normal CN(0, 1): real and imaginary parts
  /// are independent N(0, 1/2). Consumes exactly two uniforms per call.
  Complex complex_normal() {
    const Real u1 = uniform();
    const Real u2 = uniform();
    const Real r = std::sqrt(-std::log(u1));  // Rayleigh with E[r^2] = 1
    return Complex(r * std::cos(2.0 * M_PI * u2), r * std::sin(2.0 * M_PI * u2));
  }

  /// Vector of independent CN(0, 1) entries.
  CVector complex_normal_vector(int n) {
    CVector v(n);
    for (int i = 0; i < n; ++i) v(i) = complex_normal();
    return v;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cobeam
