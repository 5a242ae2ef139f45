// Copyright 2026 The radscale Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>

namespace radscale {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Purpose tags for the streams split off the single root seed.
enum class Stream : std::uint64_t {
  kRaySelection = 1,
  kStratification = 2,
  kInit = 3,
  kMonteCarlo = 4,
  kScene = 5,
  kProbe = 6,
};

/// Key for (root seed, stream, a, b). Each level is folded in through
/// splitmix64 so that nearby inputs give unrelated keys; `a` and `b` are
/// typically (iteration, ray) or (camera, repetition).
inline constexpr std::uint64_t derive_key(std::uint64_t root, Stream stream, std::uint64_t a = 0,
                                          std::uint64_t b = 0) {
  std::uint64_t k = splitmix64(root);
  k = splitmix64(k ^ static_cast<std::uint64_t>(stream));
  k = splitmix64(k ^ a);
  return splitmix64(k ^ (b * 0xD1B54A32D192ED03ull));
}

/// Counter-based generator: draw n is splitmix64(key + n * golden). Any
/// (key, counter) pair can be reproduced without replaying earlier draws,
/// so results do not depend on how work is split across threads.
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() { return splitmix64(key_ + (++counter_) * 0x9E3779B97F4A7C15ull); }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). Lemire-style multiply-shift; the bias is
  /// below 2^-32 for n < 2^32.
  constexpr std::uint64_t below(std::uint64_t n) {
    const unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace radscale
