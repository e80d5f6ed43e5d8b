#pragma once

// Minimal worker pool: runs fn(0..n-1) on up to `workers` threads. Results
// are written by index by the caller, so ordering is deterministic. After the
// first failure no new indices are started; the failure with the lowest index
// is rethrown once all threads have joined.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace qdgate {

template <class F>
void parallel_for(std::size_t n, unsigned workers, F&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (;;) {
      if (failed.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed.store(true);
      }
    }
  };
  const std::size_t nthreads = std::min<std::size_t>(std::max(1u, workers), n);
  if (nthreads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(work);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace qdgate
