#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

namespace ftlz {

/// 0 selects the OpenMP default.
inline int resolve_threads(int requested) { return requested > 0 ? requested : omp_get_max_threads(); }

/// Runs fn(b) for b in [0, n). With one thread this is a plain serial loop,
/// which is the reference the parallel path is tested against. The first
/// failing index's exception (lowest b) is rethrown after the loop, so the
/// error surfaced does not depend on scheduling.
template <class Fn>
void for_each_block(std::size_t n, int threads, Fn&& fn) {
  threads = resolve_threads(threads);
  if (threads <= 1 || n <= 1) {
    for (std::size_t b = 0; b < n; ++b) fn(b);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
  for (long long b = 0; b < count; ++b) {
    try {
      fn(static_cast<std::size_t>(b));
    } catch (...) {
      errors[static_cast<std::size_t>(b)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace ftlz
