#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ucp {

inline std::size_t default_workers() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

/// Runs body(i) for i in [0, n) over contiguous chunks, one chunk per worker.
/// The body must only write state owned by index i; the first exception
/// thrown by any worker is rethrown on the calling thread.
template <typename Body>
void parallel_for(std::size_t n, std::size_t workers, Body&& body) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers - 1);
    auto run_chunk = [&](std::size_t w) {
      const std::size_t first = n * w / workers;
      const std::size_t last = n * (w + 1) / workers;
      try {
        for (std::size_t i = first; i < last; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    };
    for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(run_chunk, w);
    run_chunk(0);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace ucp
