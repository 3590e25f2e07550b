#pragma once

#include <cstdint>
#include <random>

namespace curvelab {

/// Stream tags keep independent random consumers of one realization apart.
enum class StreamTag : std::uint64_t {
  Obstacles = 1,
  Geometry = 2,
  Paths = 3,
  Auxiliary = 4,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the stream keyed by (master, index, tag). Injective in practice:
/// each component passes through its own splitmix round.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                           StreamTag tag) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ splitmix64(index + 0x632be59bd9b4e019ULL));
  return splitmix64(h ^ static_cast<std::uint64_t>(tag));
}

inline std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t index, StreamTag tag) {
  return std::mt19937_64(derive_seed(master, index, tag));
}

}  // namespace curvelab
