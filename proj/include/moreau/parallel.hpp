#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace moreau {

/// Thread cap for internal parallelism.  MOREAU_LAB_THREADS overrides the
/// hardware default; values < 1 are treated as 1.
inline int thread_budget() {
  if (const char* env = std::getenv("MOREAU_LAB_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
    return 1;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs body(i) for i in [0, n).  Results must be written into per-index
/// slots by the caller; the reduction order is then independent of the
/// thread count, keeping outputs deterministic.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  int threads = thread_budget();
  if (threads <= 1 || n < 32) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace moreau
