#pragma once

#include <bit>
#include <cmath>
#include <span>
#include <cstdint>
#include <random>
#include <vector>

#include "ftlz/core.hpp"

namespace ftlz::test {

inline std::vector<float> random_values(std::size_t n, std::uint64_t seed, float lo = -1.0f, float hi = 1.0f) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> dist(lo, hi);
  std::vector<float> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

inline std::vector<std::uint32_t> random_words(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint32_t> v(n);
  for (auto& x : v) x = static_cast<std::uint32_t>(rng());
  return v;
}

inline bool bit_identical(std::span<const float> a, std::span<const float> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t n = 0; n < a.size(); ++n)
    if (std::bit_cast<std::uint32_t>(a[n]) != std::bit_cast<std::uint32_t>(b[n])) return false;
  return true;
}

inline double max_error(std::span<const float> a, std::span<const float> b) {
  double m = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    const double e = std::abs(static_cast<double>(a[n]) - static_cast<double>(b[n]));
    if (e > m) m = e;
  }
  return m;
}

inline bool bit_identical(const Field& a, const Field& b) {
  return a.dims() == b.dims() && bit_identical(a.values(), b.values());
}

inline double max_error(const Field& a, const Field& b) { return max_error(a.values(), b.values()); }

}  // namespace ftlz::test
