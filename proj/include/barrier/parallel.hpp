#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace barrier {

// Static contiguous split of [0, n). Each index is handled by exactly one
// call to f, so results do not depend on the thread count.
template <class F>
void parallel_for(int n, int threads, F&& f) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  int chunk = (n + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    int lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &f] {
      for (int i = lo; i < hi; ++i) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

} // namespace barrier
