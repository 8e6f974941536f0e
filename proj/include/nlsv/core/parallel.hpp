#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nlsv {

/// Process-wide worker count used by the parallel sweeps.
inline int& worker_count() {
  static int n = 1;
  return n;
}

/// True on pool threads; nested parallel_for calls then run inline.
inline bool& inside_pool() {
  thread_local bool flag = false;
  return flag;
}

/// Runs fn(i) for i in [0, n). Results must be written to disjoint slots, so
/// the output does not depend on the worker count.
template <class Fn>
void parallel_for(int n, Fn&& fn, int workers = worker_count()) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1 || inside_pool()) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      inside_pool() = true;
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace nlsv
