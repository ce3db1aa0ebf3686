#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace dwt {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs body(i) for i in [0, count) on a static partition of `threads` workers.
// Results must be written to per-index slots so the outcome does not depend
// on the schedule. The first exception thrown by any worker is rethrown.
template <class F>
void parallel_for(std::int64_t count, F&& body, int threads = 0) {
  const int t = std::min<std::int64_t>(resolve_threads(threads), count);
  if (count <= 0) return;
  if (t <= 1) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::vector<std::thread> pool;
  pool.reserve(t);
  for (int w = 0; w < t; ++w) {
    const std::int64_t lo = count * w / t;
    const std::int64_t hi = count * (w + 1) / t;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::int64_t i = lo; i < hi && !failed.load(std::memory_order_relaxed); ++i)
          body(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace dwt
