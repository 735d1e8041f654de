#include "depthdist/parallel.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace depthdist {

namespace {
std::atomic<unsigned> g_threads{0};
}

void set_thread_count(unsigned count) { g_threads.store(count); }

unsigned thread_count() {
  const unsigned configured = g_threads.load();
  if (configured > 0) return configured;
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {

void run_chunks(Index chunks, unsigned workers, const std::function<void(Index, unsigned)>& task) {
  std::atomic<Index> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto loop = [&](unsigned worker) {
    try {
      for (Index chunk = next++; chunk < chunks; chunk = next++) task(chunk, worker);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = chunks;
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(loop, w);
  loop(0);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail
}  // namespace depthdist
