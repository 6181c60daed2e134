#pragma once

#include <cstdlib>
#include <thread>
#include <vector>

namespace ssde {

// Worker count: SINGULAR_SDE_THREADS overrides (0 = auto).
inline unsigned worker_count() {
  if (const char* env = std::getenv("SINGULAR_SDE_THREADS")) {
    const long v = std::atol(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Runs fn(i) for i in [0, n).  Results must be written to preassigned slots;
// the engine's counter-based noise makes the outcome independent of the
// execution order.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const unsigned workers = worker_count();
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const unsigned used = static_cast<unsigned>(
      std::min<std::size_t>(workers, n));
  pool.reserve(used);
  for (unsigned w = 0; w < used; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += used) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace ssde
