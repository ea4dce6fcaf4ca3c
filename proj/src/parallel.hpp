#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace homog::detail {

// Runs fn(i) for i in [0,n) on all hardware threads. Work stealing via a
// shared atomic counter; fn must be safe to call concurrently for distinct i.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
  int n_threads = static_cast<int>(std::thread::hardware_concurrency());
  if (n_threads < 1) n_threads = 1;
  n_threads = std::min(n_threads, n);
  if (n_threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

} // namespace homog::detail
