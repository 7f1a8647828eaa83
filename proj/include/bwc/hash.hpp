#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace bwc {

inline constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;

/// 64-bit FNV-1a, continuing from `seed`.
inline std::uint64_t fnv1a(std::span<const unsigned char> bytes, std::uint64_t seed = kFnvOffset) {
  std::uint64_t h = seed;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t seed = kFnvOffset) {
  return fnv1a(std::span(reinterpret_cast<const unsigned char*>(s.data()), s.size()), seed);
}

/// 16 lowercase hex digits.
std::string hex64(std::uint64_t v);

}  // namespace bwc
