#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace dmbl {

// splitmix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Order-sensitive hash of a word sequence. Stable across platforms and runs.
constexpr std::uint64_t stable_hash(std::initializer_list<std::uint64_t> words) noexcept {
  std::uint64_t state = 0x6a09e667f3bcc909ULL;
  for (auto w : words) state = mix64(state ^ mix64(w));
  return state;
}

inline std::uint64_t double_bits(double x) noexcept {
  if (x == 0.0) x = 0.0;  // fold -0.0 onto +0.0
  return std::bit_cast<std::uint64_t>(x);
}

// The named generator is std::mt19937_64, whose output sequence is fixed by the
// standard. Distributions are derived by hand because std::*_distribution is
// implementation-defined.
using Engine = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Engine& engine) { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }

// Uniform integer in [0, n) by rejection, no modulo bias.
inline std::uint64_t uniform_index(Engine& engine, std::uint64_t n) {
  const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n + 1) % n;
  std::uint64_t x;
  do {
    x = engine();
  } while (x > limit);
  return x % n;
}

}  // namespace dmbl
