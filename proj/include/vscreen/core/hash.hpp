#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace vscreen {

// Stable 64-bit hashing used for atom invariants, fragment identifiers and
// seed derivation. The exact bit patterns are part of the fingerprint file
// format, so these functions must never change behavior across platforms or
// releases.

// Finalizer from splitmix64.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
  return mix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

inline std::uint64_t hash_u64s(std::span<const std::uint64_t> values,
                               std::uint64_t seed = 0x5ca1ab1e0ddba11ULL) {
  std::uint64_t h = mix64(seed);
  for (std::uint64_t v : values) h = hash_combine(h, v);
  return h;
}

inline std::uint64_t hash_string(std::string_view s,
                                 std::uint64_t seed = 0x5ca1ab1e0ddba11ULL) {
  // FNV-1a over bytes, then mixed; byte order independent of endianness.
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

}  // namespace vscreen
