#pragma once

// Deterministic parallel map: results land in pre-sized slots keyed by
// index, so the output is identical for any thread count.

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace bmolab {

inline void parallel_for(size_t count, int threads, const std::function<void(size_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const int workers = std::min<int>(threads, static_cast<int>(count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w]() {
      for (size_t i = static_cast<size_t>(w); i < count; i += static_cast<size_t>(workers)) fn(i);
    });
  for (auto& t : pool) t.join();
}

} // namespace bmolab
