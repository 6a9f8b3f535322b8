#ifndef TCPWIN_PARALLEL_HPP
#define TCPWIN_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace tcpwin {

// Runs run_block(begin, end, block_index) for consecutive index blocks of
// size block_size, distributed over a small worker pool. Blocks carry their
// own index so callers can derive per-block streams and per-block
// accumulators; reducing those in block order afterwards makes results
// independent of thread count and scheduling.
inline void parallel_blocks(
    std::size_t n_items, std::size_t block_size,
    const std::function<void(std::size_t, std::size_t, std::size_t)>& run_block,
    unsigned workers = 0) {
  if (n_items == 0) return;
  if (block_size == 0) block_size = 1;
  const std::size_t n_blocks = (n_items + block_size - 1) / block_size;
  if (workers == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    workers = hw == 0 ? 1 : hw;
  }
  if (workers <= 1 || n_blocks == 1) {
    for (std::size_t b = 0; b < n_blocks; ++b) {
      const std::size_t begin = b * block_size;
      const std::size_t end = std::min(begin + block_size, n_items);
      run_block(begin, end, b);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      const std::size_t begin = b * block_size;
      const std::size_t end = std::min(begin + block_size, n_items);
      run_block(begin, end, b);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
}

}  // namespace tcpwin

#endif  // TCPWIN_PARALLEL_HPP
