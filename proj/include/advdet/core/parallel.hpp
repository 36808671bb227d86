#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace advdet {

/// Runs fn(i) for i in [0, n) across at most `workers` threads. Work is
/// sharded contiguously and results land at fixed indices, so the outcome is
/// independent of scheduling (ordered reduction).
inline void parallel_for_ordered(std::size_t n, int workers,
                                 const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t shards = std::min<std::size_t>(workers, n);
  std::vector<std::thread> threads;
  threads.reserve(shards);
  for (std::size_t s = 0; s < shards; ++s) {
    threads.emplace_back([&, s] {
      for (std::size_t i = s; i < n; i += shards) fn(i);
    });
  }
  for (auto& t : threads) t.join();
}

}  // namespace advdet
