#pragma once

#include <cstdint>
#include <limits>

namespace rsfilt {

/// SplitMix64: a 64-bit splittable generator. Satisfies
/// UniformRandomBitGenerator so it plugs into <random> distributions.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Seed of the independent stream used for path `index` of an experiment
/// seeded with `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  SplitMix64 outer(seed);
  const std::uint64_t base = outer();
  SplitMix64 inner(base ^ (index * 0xd1b54a32d192ed03ULL + 0x2545f4914f6cdd1dULL));
  return inner();
}

}  // namespace rsfilt
