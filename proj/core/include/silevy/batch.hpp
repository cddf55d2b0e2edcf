#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace silevy {

/// Worker count from SILEVY_THREADS, else the hardware concurrency (>= 1).
unsigned default_threads();

/// Runs job(i) for i in [0, count) on up to `threads` workers and returns the
/// results in index order, so the output never depends on scheduling. The
/// first exception thrown by a job is rethrown after all workers stop.
template <class T, class Job>
std::vector<T> run_batch(std::size_t count, unsigned threads, Job&& job) {
  std::vector<T> results(count);
  if (threads <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) results[i] = job(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        results[i] = job(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const unsigned n = std::min<std::size_t>(threads, count);
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
  return results;
}

}  // namespace silevy
