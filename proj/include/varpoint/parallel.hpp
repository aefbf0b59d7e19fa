#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace varpoint {

/// Resolve a worker-count request: 0 means hardware concurrency.
inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Calls body(i) for i in [0, n) on up to `workers` threads, in contiguous
/// blocks. Bodies must only write to slots owned by i, so results do not
/// depend on the schedule. The first exception thrown is rethrown.
template <class Body>
void parallel_for(std::size_t n, int workers, Body&& body) {
  const auto w = static_cast<std::size_t>(std::max(1, resolve_workers(workers)));
  if (w == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  const std::size_t threads = std::min(w, n);
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t k = 0; k < threads; ++k) {
    const std::size_t begin = n * k / threads;
    const std::size_t end = n * (k + 1) / threads;
    pool.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace varpoint
