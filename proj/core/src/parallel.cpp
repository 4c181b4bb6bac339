#include "wienerlab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace wienerlab {

namespace {
std::atomic<unsigned> g_max_threads{0};

unsigned resolved_threads() {
  const unsigned cap = g_max_threads.load(std::memory_order_relaxed);
  if (cap != 0) return cap;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}
}  // namespace

void set_max_threads(unsigned n) noexcept { g_max_threads.store(n, std::memory_order_relaxed); }

unsigned max_threads() noexcept { return resolved_threads(); }

void parallel_for_chunked(std::size_t begin, std::size_t end,
                          const std::function<void(std::size_t, std::size_t)>& fn) {
  if (end <= begin) return;
  const std::size_t total = end - begin;
  const unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(resolved_threads(), total));
  if (workers <= 1) {
    fn(begin, end);
    return;
  }

  // Fixed block partition: worker w owns one contiguous range.
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr error;
  std::mutex error_mu;
  const std::size_t chunk = (total + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t lo = begin + static_cast<std::size_t>(w) * chunk;
    if (lo >= end) break;
    const std::size_t hi = std::min(end, lo + chunk);
    pool.emplace_back([&, lo, hi] {
      try {
        fn(lo, hi);
      } catch (...) {
        std::lock_guard<std::mutex> lk(error_mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn) {
  parallel_for_chunked(begin, end, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) fn(i);
  });
}

}  // namespace wienerlab
