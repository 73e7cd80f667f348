#pragma once

#include <cstdint>
#include <random>

namespace rdbss {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream key from a base seed and a pair of counters.
/// The result depends only on the inputs, never on call order.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a,
                                    std::uint64_t b = 0) noexcept {
  std::uint64_t z = mix64(seed);
  z = mix64(z ^ (a * 0xD6E8FEB86659FD93ULL + 0x632BE59BD9B4E019ULL));
  z = mix64(z ^ (b * 0xA0761D6478BD642FULL + 0xE7037ED1A0B428DBULL));
  return z;
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return Engine(derive_seed(seed, a, b));
}

} // namespace rdbss
