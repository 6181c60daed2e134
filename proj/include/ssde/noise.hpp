#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace ssde {

// Philox 4x32-10 counter-based generator. Every random number is a pure
// function of (seed, stream, path, step, slot), so paths and path segments
// can be produced in any order, on any number of workers, with identical
// results.
namespace philox {

inline constexpr std::uint32_t kMul0 = 0xD2511F53u;
inline constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                          std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const std::array<std::uint32_t, 4> next{
        static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
        static_cast<std::uint32_t>(p1),
        static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
        static_cast<std::uint32_t>(p0)};
    ctr = next;
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace philox

// Uniform in (0, 1] from 53 random bits.
inline double u53_to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits =
      ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return static_cast<double>(bits + 1) * 0x1.0p-53;
}

// Deterministic stream of standard normal increments and auxiliary uniforms,
// addressed by (path, step).  `stream` separates statistically independent
// families (one per experiment / per test).
class NoiseSource {
 public:
  NoiseSource(std::uint64_t seed, std::uint64_t stream)
      : seed_(seed), stream_(stream) {
    const std::uint64_t k =
        philox::splitmix64(seed) ^ philox::splitmix64(~stream + 0x632BE59Bull);
    key_ = {static_cast<std::uint32_t>(k),
            static_cast<std::uint32_t>(k >> 32)};
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // Standard normal increment for (path, step).  Consecutive steps share one
  // Philox block through the two Box-Muller outputs.
  double normal(std::uint64_t path, std::uint64_t step) const {
    const std::uint64_t pair = step >> 1;
    const auto w = philox::block(
        {static_cast<std::uint32_t>(pair),
         static_cast<std::uint32_t>(pair >> 32),
         static_cast<std::uint32_t>(path),
         static_cast<std::uint32_t>(path >> 32)},
        key_);
    const double u1 = u53_to_unit(w[0], w[1]);
    const double u2 = u53_to_unit(w[2], w[3]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    return (step & 1u) ? r * std::sin(angle) : r * std::cos(angle);
  }

  // Auxiliary uniform in (0, 1] for (path, step); slot >= 1 keeps these
  // independent from the normal stream (slot 0).
  double uniform(std::uint64_t path, std::uint64_t step,
                 std::uint32_t slot) const {
    const auto w = philox::block(
        {static_cast<std::uint32_t>(step),
         static_cast<std::uint32_t>(step >> 32),
         static_cast<std::uint32_t>(path),
         static_cast<std::uint32_t>(path >> 32) ^ (slot << 24)},
        key_);
    return u53_to_unit(w[0], w[1]);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::array<std::uint32_t, 2> key_;
};

}  // namespace ssde
