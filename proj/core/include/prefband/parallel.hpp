#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace prefband {

/// Runs fn(i) for i in [0, n) across up to `jobs` worker threads.
/// Work items must be independent; results should land in pre-sized
/// per-index slots so output order never depends on scheduling.
template <typename Fn>
void parallel_for_index(int n, int jobs, Fn&& fn) {
  if (n <= 0) return;
  if (jobs <= 1 || n == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  const int workers = std::min(jobs, n);
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

}  // namespace prefband
