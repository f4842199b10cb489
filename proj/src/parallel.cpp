#include "minklab/parallel.hpp"

#include <algorithm>

namespace minklab {
namespace {

std::atomic<int> g_limit{0};

}  // namespace

void set_thread_limit(int n) { g_limit.store(std::max(0, n)); }

int thread_limit() {
  int n = g_limit.load();
  if (n > 0) return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace minklab
