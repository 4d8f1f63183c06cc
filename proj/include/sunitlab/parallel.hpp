#pragma once

// Index-based parallel map with deterministic, order-preserving emission.
// Results depend only on the index, so output is byte-identical for any
// worker count.

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace sunitlab {

template <class R, class F>
std::vector<R> parallel_map(std::size_t count, unsigned jobs, F&& fn) {
  std::vector<R> out(count);
  if (count == 0) return out;
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) break;
      try {
        out[i] = fn(i);
      } catch (...) {
        if (!failed.exchange(true)) err = std::current_exception();
        break;
      }
    }
  };
  std::vector<std::thread> pool;
  unsigned n = std::min<std::size_t>(jobs, count);
  pool.reserve(n);
  for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
  return out;
}

// Chunked variant for long streams: computes blocks in parallel, hands each
// result to `sink` in index order, keeps memory bounded by the chunk size.
template <class R, class F, class Sink>
void parallel_for_ordered(std::size_t count, unsigned jobs, F&& fn, Sink&& sink,
                          std::size_t chunk = 1024) {
  for (std::size_t base = 0; base < count; base += chunk) {
    std::size_t n = std::min(chunk, count - base);
    auto block = parallel_map<R>(n, jobs, [&](std::size_t i) { return fn(base + i); });
    for (std::size_t i = 0; i < n; ++i) sink(base + i, block[i]);
  }
}

}  // namespace sunitlab
