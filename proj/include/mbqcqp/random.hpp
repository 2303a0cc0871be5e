#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace mbqcqp::rng {

// Stream derivation, version 1: SplitMix64 finalizer chained over
// (seed, tag, indices...), feeding std::mt19937_64. Changing any of these
// constants changes every generated instance and rounding sample.
inline constexpr std::string_view kStreamVersion = "splitmix64-mt19937_64/v1";

inline constexpr std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// FNV-1a, so stream tags are stable across standard library implementations.
inline constexpr std::uint64_t tag_hash(std::string_view tag) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline constexpr std::uint64_t derive(std::uint64_t seed, std::string_view tag) {
  return mix(seed ^ mix(tag_hash(tag)));
}

template <typename... Ix>
constexpr std::uint64_t derive(std::uint64_t seed, std::string_view tag, std::uint64_t first,
                               Ix... rest) {
  return derive(mix(derive(seed, tag) ^ mix(first + 1)), tag, static_cast<std::uint64_t>(rest)...);
}

using Engine = std::mt19937_64;

template <typename... Ix>
Engine stream(std::uint64_t seed, std::string_view tag, Ix... ix) {
  return Engine(derive(seed, tag, static_cast<std::uint64_t>(ix)...));
}

}  // namespace mbqcqp::rng
