// SPDX-License-Identifier: Apache-2.0
//
// Counter-based Gaussian stream: each draw is a pure function of
// (seed, stream, counter), so paths are reproducible and independent under
// any thread schedule.

#pragma once

#include <cmath>
#include <cstdint>

namespace kbm {

// SplitMix64 finalizer; full-avalanche 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : state_(mix64(mix64(seed) ^ mix64(stream * 0x9e3779b97f4a7c15ULL + 1))) {}

  // uniform in (0, 1); counter advances by one per call
  double uniform() {
    const std::uint64_t bits = mix64(state_ ^ counter_++);
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  // standard normal via Box-Muller (one cached value)
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double phi = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(phi);
    has_cached_ = true;
    return r * std::cos(phi);
  }

 private:
  std::uint64_t state_;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace kbm
