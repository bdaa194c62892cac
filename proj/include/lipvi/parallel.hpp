#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <thread>
#include <vector>

namespace lipvi {

/// Worker count from LIPVI_THREADS (0 or unset = hardware concurrency).
inline std::size_t thread_count() {
  std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LIPVI_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return hw;
}

/// Runs fn(begin, end) over contiguous blocks of [0, n). Each index is owned by
/// exactly one block, so callers writing to per-index slots get results that do
/// not depend on the thread count.
template <class Fn>
void parallel_blocks(std::size_t n, Fn&& fn, std::size_t min_block = 256) {
  std::size_t workers = std::min(thread_count(), (n + min_block - 1) / std::max<std::size_t>(min_block, 1));
  if (workers <= 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t b = w * chunk;
    std::size_t e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&fn, b, e] { fn(b, e); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace lipvi
