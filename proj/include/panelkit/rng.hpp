#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <vector>

/*
 * rng.hpp
 * -------
 * All toolkit randomness flows through a SplitMix64 generator so that seeded
 * runs are bit-identical across platforms (std::uniform_int_distribution and
 * friends are implementation-defined, which would break that contract).
 *
 * Stream splitting: child k of seed s starts from mix64(s + mix64(k + 1)).
 * Placebo replications and Monte Carlo draws each own a child stream, so
 * parallel and sequential execution see the same numbers.
 */

namespace panelkit::rng {

// SplitMix64 finalizer (Stafford variant 13).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed + mix64(index + 1));
}

class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Unbiased uniform integer in [0, n) via rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t rem = (max % n + 1) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t r = next();
      if (rem == 0 || r <= max - rem) return r % n;
    }
  }

  // Standard normal via Box-Muller; the second draw of each pair is cached.
  double gaussian() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
  }

private:
  std::uint64_t state_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

// First k positions of a Fisher-Yates shuffle of {0, ..., n-1}.
inline std::vector<std::size_t> sample_without_replacement(SplitMix64& gen,
                                                           std::size_t n,
                                                           std::size_t k) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(gen.below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace panelkit::rng
