#ifndef FND_RANDOM_HPP
#define FND_RANDOM_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace fnd {

using Rng = std::mt19937_64;

/// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a64(std::string_view bytes,
                                std::uint64_t hash = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the named sub-stream `stream` under the run seed. Streams are
/// independent of each other, so adding a consumer never shifts another.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::string_view stream) {
  return splitmix64(seed ^ fnv1a64(stream));
}

inline Rng make_rng(std::uint64_t seed, std::string_view stream) {
  return Rng(stream_seed(seed, stream));
}

}  // namespace fnd

#endif  // FND_RANDOM_HPP
