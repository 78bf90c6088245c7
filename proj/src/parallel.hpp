#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace netflow::detail {

/// Runs body(i) for i in [0, n); each index is touched by exactly one thread,
/// so results written per index are independent of scheduling.
template <class Body>
void parallel_for(std::size_t n, std::size_t min_chunk, Body&& body) {
  const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(hw, std::max<std::size_t>(1, n / std::max<std::size_t>(1, min_chunk)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
}

}  // namespace netflow::detail
