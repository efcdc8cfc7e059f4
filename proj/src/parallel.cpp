#include "hardgrid/parallel.hpp"

#include <atomic>

namespace hardgrid {
namespace {
std::atomic<std::size_t> g_threads{0};
}

void set_thread_count(std::size_t threads) { g_threads.store(threads, std::memory_order_relaxed); }

std::size_t thread_count() {
  const std::size_t requested = g_threads.load(std::memory_order_relaxed);
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace hardgrid
