#ifndef FUSEPEEL_RNG_HPP
#define FUSEPEEL_RNG_HPP

#include <cstdint>

namespace fusepeel {

// All randomness in this project is derived from splitmix64 (Vigna's
// public-domain generator). mix64 is its output finalizer; mix2 combines
// two words by finalizing twice, so derived streams for (a, i) and (a, i')
// are uncorrelated. Both are pure, which keeps every generator in the
// project a deterministic function of (seed, index).

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

// mix2(a, b) = mix64(a + mix64(b + golden))
constexpr std::uint64_t mix2(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(a + mix64(b + kGolden));
}

// Counter-based splitmix64 stream. next() = mix64(state += golden).
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept { return mix64(state_ += kGolden); }

  // Uniform in [0, n). Plain modulo; the bias is O(n / 2^64) and every n in
  // this project is far below 2^32.
  constexpr std::uint64_t next_below(std::uint64_t n) noexcept {
    return next() % n;
  }

  // Uniform double in [0, 1) with 53 random bits.
  constexpr double next_unit() noexcept {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

}  // namespace fusepeel

#endif  // FUSEPEEL_RNG_HPP
