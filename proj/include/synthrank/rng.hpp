//
// Project SynthRank - Copyright 2026 SynthRank contributors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef SYNTHRANK_RNG_HPP
#define SYNTHRANK_RNG_HPP

#include <cstdint>
#include <vector>

namespace synthrank {

// splitmix64 finalizer; fixed constants, identical on every platform.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(a) ^ (b + 0x9e3779b97f4a7c15ULL));
}

// Counter-based generator: the value at position n is a pure function of
// (seed, stream, n), so independent consumers never interfere and any
// draw can be reproduced without replaying the sequence.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(mix64(seed, stream)) {}

  std::uint64_t next_u64() { return mix64(state_, counter_++); }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t next_below(std::uint64_t n) {
    // Rejection-free modulo is fine here; n is tiny compared to 2^64.
    return next_u64() % n;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
  std::uint64_t counter_ = 0;
};

}  // namespace synthrank

#endif
