#pragma once

#include <cmath>
#include <cstdint>

namespace lpasim {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() { return mix64(state_ += kGolden); }

 private:
  std::uint64_t state_;
};

/// Substream addressing: hashing (seed, tag, id0, id1) yields an independent
/// generator per entity, so growing the seller count or the request count
/// leaves every other entity's draws untouched.
inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t tag,
                                std::uint64_t id0 = 0, std::uint64_t id1 = 0) {
  std::uint64_t h = mix64(seed + kGolden);
  h = mix64(h ^ (tag + kGolden));
  h = mix64(h ^ (id0 + kGolden));
  h = mix64(h ^ (id1 + kGolden));
  return h;
}

class StreamRng {
 public:
  StreamRng(std::uint64_t seed, std::uint64_t tag, std::uint64_t id0 = 0,
            std::uint64_t id1 = 0)
      : gen_(stream_key(seed, tag, id0, id1)) {}

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(gen_.next() >> 11) * 0x1.0p-53;
  }

  /// Uniform in (0, 1): redraws exact zeros.
  double uniform_positive() {
    double u = uniform();
    while (u == 0.0) u = uniform();
    return u;
  }

  /// Standard normal via the Marsaglia polar method; pairs are cached.
  double normal() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    cached_ = v * f;
    has_cached_ = true;
    return u * f;
  }

 private:
  SplitMix64 gen_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace lpasim
