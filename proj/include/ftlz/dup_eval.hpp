#pragma once

#include <bit>
#include <cstdint>

namespace ftlz {

/// Forces `v` through memory so the compiler cannot merge repeated
/// evaluations of the same expression.
inline void opaque(float& v) {
#if defined(__GNUC__) || defined(__clang__)
  asm volatile("" : "+m"(v) : : "memory");
#else
  volatile float sink = v;
  v = sink;
#endif
}

struct DupResult {
  float value = 0.0f;
  int evaluations = 0;
  /// True when the first two evaluations disagreed.
  bool mismatch = false;
  /// False when all three evaluations differed; the caller must fall back.
  bool resolved = true;
};

/// Evaluates `compute` twice with identical operation order and compares the
/// bit patterns. On a mismatch a third evaluation decides by 2-of-3 vote.
/// `perturb(attempt, value)` lets tests model a faulty evaluation; it is
/// skipped when empty.
template <class Compute, class Perturb>
DupResult duplicated_eval(Compute&& compute, Perturb&& perturb) {
  float r[3];
  auto eval = [&](int attempt) {
    float v = compute();
    opaque(v);
    perturb(attempt, v);
    r[attempt] = v;
  };
  auto same = [&](int a, int b) { return std::bit_cast<std::uint32_t>(r[a]) == std::bit_cast<std::uint32_t>(r[b]); };

  eval(0);
  eval(1);
  if (same(0, 1)) return {r[0], 2, false, true};
  eval(2);
  if (same(0, 2)) return {r[0], 3, true, true};
  if (same(1, 2)) return {r[1], 3, true, true};
  return {r[0], 3, true, false};
}

template <class Compute>
DupResult duplicated_eval(Compute&& compute) {
  return duplicated_eval(compute, [](int, float&) {});
}

}  // namespace ftlz
