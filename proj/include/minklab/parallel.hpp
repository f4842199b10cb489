#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace minklab {

/// Caps the number of worker threads (0 restores the hardware default).
void set_thread_limit(int n);
int thread_limit();

/// Runs f(chunk) for chunk in [0, n_chunks). Chunks are claimed dynamically,
/// so callers must write results by chunk index and reduce in index order.
template <class F>
void parallel_chunks(std::size_t n_chunks, F&& f) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_limit()), n_chunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) f(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n_chunks);
  auto run = [&] {
    for (;;) {
      std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      try {
        f(c);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace minklab
