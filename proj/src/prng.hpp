#pragma once

#include <cstdint>

#include "rational.hpp"

namespace md {

// splitmix64; deterministic across platforms, unlike the std:: distributions.
struct Prng {
  uint64_t state;

  explicit Prng(uint64_t seed) : state(seed) {}

  uint64_t next() {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). n > 0.
  uint64_t below(uint64_t n) { return next() % n; }

  // Uniform in [lo, hi] inclusive.
  long long range(long long lo, long long hi) {
    return lo + (long long)below((uint64_t)(hi - lo + 1));
  }

  // Uniform rational k/den with k in [lo*den, hi*den].
  Rat rat_range(long long lo, long long hi, long long den) {
    return Rat(Int(range(lo * den, hi * den)), Int(den));
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = (size_t)below(i);
      std::swap(v[i - 1], v[j]);
    }
  }
};

}  // namespace md
