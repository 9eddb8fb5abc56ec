#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

// Deterministic random helpers. Everything here draws raw 64-bit words from
// std::mt19937_64 and maps them to doubles by hand, so the same seed produces
// the same stream on every platform and standard library.

namespace cordel::rng {

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// splitmix64 finalizer over the combination of two seeds.
inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ull + b;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Uniform in [0,1) with 53-bit resolution.
inline double uniform01(std::mt19937_64& g) {
  return double(g() >> 11) * 0x1.0p-53;
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return lo + (hi - lo) * uniform01(g);
}

// Standard normal via Box-Muller; consumes exactly two words per call.
inline double gaussian(std::mt19937_64& g) {
  constexpr double kTwoPi = 6.283185307179586;
  double u1 = double((g() >> 11) + 1) * 0x1.0p-53;  // (0,1], keeps log finite
  double u2 = double(g() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

// Unbiased integer in [0,n) by rejection sampling.
inline std::uint64_t bounded(std::mt19937_64& g, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("rng::bounded: n must be positive");
  std::uint64_t rem = (0ull - n) % n;  // 2^64 mod n
  std::uint64_t r = g();
  if (rem != 0) {
    std::uint64_t limit = 0ull - rem;  // largest multiple of n
    while (r >= limit) r = g();
  }
  return r % n;
}

// Fisher-Yates with the deterministic bounded() above.
template <typename T>
void shuffle(std::vector<T>& items, std::mt19937_64& g) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[bounded(g, i)]);
  }
}

}  // namespace cordel::rng
