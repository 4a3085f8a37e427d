/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 rofsim contributors
 * SPDX-License-Identifier: Apache-2.0
 */
#pragma once

#include <cstdint>

#include "rofsim/common.hpp"

namespace rofsim {

// Identifies an independent noise stream. Every stochastic stage of a run owns
// its own stream id so results do not depend on stage evaluation order, which
// is what makes serial and parallel sweeps byte-identical.
struct RngHandle {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

namespace detail {

// splitmix64 finalizer (Steele et al.). Bit-exact on every platform, unlike
// the unspecified std::normal_distribution implementations.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace detail

// Deterministic Gaussian/uniform generator: splitmix64 stream keyed by
// (seed, stream_id), Box-Muller for normals.
class NoiseRng {
 public:
  explicit NoiseRng(RngHandle h)
      : state_(detail::mix64(detail::mix64(h.seed + 0x9E3779B97F4A7C15ull) ^
                             (h.stream_id * 0xBF58476D1CE4E5B9ull + 1ull))) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return detail::mix64(state_);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]; safe as a log() argument.
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  bool bit() { return (next_u64() >> 63) != 0; }

  // Standard normal via Box-Muller; the pair's second member is cached so a
  // fixed seed yields a fixed sequence regardless of platform.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * kPi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Circularly symmetric complex Gaussian with E|x|^2 = total_variance.
  cplx cscg(double total_variance) {
    const double s = std::sqrt(total_variance / 2.0);
    const double re = gaussian();
    const double im = gaussian();
    return cplx(s * re, s * im);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace rofsim
