#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace cursvd {

using Rng = std::mt19937_64;

/// One step of the splitmix64 mixer; a cheap, well-dispersed 64-bit hash.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Order-sensitive hash of several seed words; used to derive independent
/// per-trial streams so that results do not depend on thread scheduling.
constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> words) {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t w : words) h = splitmix64(h ^ w);
  return h;
}

/// Engine seeded through splitmix64 so that nearby raw seeds (seed, seed+1,
/// ...) still give decorrelated streams.
inline Rng make_rng(std::uint64_t seed) { return Rng(splitmix64(seed)); }

}  // namespace cursvd
