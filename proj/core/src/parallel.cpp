#include "ldr/parallel.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ldr {

void parallel_for(Index n, int threads, const std::function<void(Index)>& fn) {
  if (n <= 0) return;
  const int workers = std::min<int>(std::max(threads, 1), static_cast<int>(n));
  if (workers == 1) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));

  const Index chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const Index lo = static_cast<Index>(w) * chunk;
    const Index hi = std::min<Index>(lo + chunk, n);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (Index i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace ldr
