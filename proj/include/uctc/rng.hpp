#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace uctc {

// splitmix64 finalizer. Used for seed expansion and sub-stream derivation.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Derives the seed of a named sub-stream from a master seed. Every source of
// randomness in a run flows from one seed through these (stream map in the
// README), so whole runs replay bit-for-bit.
inline std::uint64_t substream(std::uint64_t seed, std::string_view name,
                               std::uint64_t index = 0) {
  return mix64(mix64(seed ^ fnv1a64(name)) + index);
}

// xoshiro256** with splitmix64 seeding. Self-contained so that sampled values
// are identical across platforms and standard-library versions (std::
// distributions make no such guarantee).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& word : state_) {
      x = mix64(x);
      word = x;
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, bound), rejection-sampled so every value is equally likely.
  std::uint64_t uniform_int(std::uint64_t bound) {
    const std::uint64_t limit = bound == 0 ? 0 : ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % bound;
  }

  bool coin() { return (next_u64() >> 63) != 0; }

  // Standard normal via Box-Muller; caches the second value of each pair.
  double gauss() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4] = {};
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace uctc
