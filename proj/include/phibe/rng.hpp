#pragma once

#include <cstdint>
#include <random>

namespace phibe {

// splitmix64 finalizer; used to derive independent per-stream seeds from a
// (master seed, stream index) pair so that parallel generation is
// order-independent.
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t a = mix64(master + 0x9E3779B97F4A7C15ULL);
  std::uint64_t b = mix64(index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
  return mix64(a ^ b);
}

inline std::mt19937_64 make_stream(std::uint64_t master, std::uint64_t index) {
  return std::mt19937_64(derive_stream_seed(master, index));
}

}  // namespace phibe
