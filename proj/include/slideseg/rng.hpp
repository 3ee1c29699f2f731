#ifndef SLIDESEG_RNG_HPP
#define SLIDESEG_RNG_HPP

#include <cmath>
#include <cstdint>

namespace slideseg {

/// splitmix64; used to expand seeds and derive per-object streams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// xoshiro256** by Blackman & Vigna. Fixed, portable generator so cohorts
/// regenerate bit-identically across platforms and languages.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1) with 53 bits of randomness.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [lo, hi] by rejection-free modulo of a wide draw.
  std::uint64_t next_range(std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo + 1;
    return lo + next_u64() % span;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Standard normal via Box-Muller (polar form avoided to keep the stream
  /// consumption fixed at two draws per sample).
  double normal(double mean = 0.0, double sigma = 1.0) {
    const double u1 = 1.0 - next_double();  // (0, 1]
    const double u2 = next_double();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sigma * r * std::cos(2.0 * M_PI * u2);
  }

  /// Independent substream keyed by index, e.g. one stream per tile.
  Rng fork(std::uint64_t key) const {
    std::uint64_t sm = s_[0] ^ (s_[3] + 0x632be59bd9b4e019ULL * (key + 1));
    return Rng(splitmix64(sm));
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

}  // namespace slideseg

#endif  // SLIDESEG_RNG_HPP
