#pragma once

#include <bit>
#include <cstdint>
#include <random>

namespace rcga {

/// Generator used by every run. Seeded runs replay exactly.
using Rng = std::mt19937_64;

inline constexpr const char* kRngName = "mt19937_64";

/// Uniform double in [0, 1) from the top 53 bits of one 64-bit draw.
/// Unlike std::uniform_real_distribution this is identical on every
/// standard library, and it consumes exactly one draw.
template <class Urbg>
inline double uniform01(Urbg& gen) {
  static_assert(Urbg::min() == 0 && Urbg::max() == ~std::uint64_t{0},
                "uniform01 expects a full-range 64-bit generator");
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// splitmix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stable seed for one replicate of one sweep cell. Each coordinate is
/// folded into a splitmix64 chain, so adding cells never changes the seeds
/// of existing ones.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t n,
                                 std::uint64_t r, double K,
                                 std::uint64_t replicate) noexcept {
  std::uint64_t h = mix64(base);
  h = mix64(h ^ n);
  h = mix64(h ^ r);
  h = mix64(h ^ std::bit_cast<std::uint64_t>(K));
  h = mix64(h ^ replicate);
  return h;
}

}  // namespace rcga
