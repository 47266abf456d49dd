#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace medial {

/// Worker count: MEDIAL_ATLAS_THREADS if set (>= 1), else the hardware
/// concurrency.
inline int worker_count() {
  if (const char* env = std::getenv("MEDIAL_ATLAS_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls body(i) for i in [0, n) over contiguous blocks, one per worker.
/// Results must be written to per-index slots so the outcome does not depend
/// on scheduling. The first exception thrown by any worker is rethrown.
template <class Body>
void parallel_for(long n, Body&& body) {
  const long workers = std::min<long>(worker_count(), std::max(1L, n / 64));
  if (workers <= 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr error;
  std::mutex guard;
  std::vector<std::thread> pool;
  const long chunk = (n + workers - 1) / workers;
  for (long w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (long i = w * chunk; i < std::min(n, (w + 1) * chunk); ++i) body(i);
      } catch (...) {
        std::lock_guard lock(guard);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace medial
