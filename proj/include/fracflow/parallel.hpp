#ifndef FRACFLOW_PARALLEL_HPP
#define FRACFLOW_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace fracflow {

// Worker cap: FRACFLOW_WORKERS env var, else hardware concurrency.
inline int default_workers() {
  if (const char* env = std::getenv("FRACFLOW_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(block) for block = 0..n_blocks-1. Blocks are claimed dynamically,
// so callers must write results into per-block slots and reduce themselves
// in block order; that keeps results independent of the worker count.
inline void parallel_for_blocks(std::size_t n_blocks, int workers,
                                const std::function<void(std::size_t)>& fn) {
  if (workers <= 0) workers = default_workers();
  if (workers == 1 || n_blocks <= 1) {
    for (std::size_t i = 0; i < n_blocks; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_blocks) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min<std::size_t>(workers, n_blocks);
  pool.reserve(n);
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace fracflow

#endif  // FRACFLOW_PARALLEL_HPP
