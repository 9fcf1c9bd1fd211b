#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace edgeplan {

inline constexpr std::string_view kVersion = "0.1.0";

// FNV-1a over a canonical string; used to stamp outputs with a config hash.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v);

}  // namespace edgeplan
