#pragma once

#include "depthdist/types.hpp"

#include <algorithm>
#include <functional>

namespace depthdist {

/// Upper bound on worker threads used by the library. 0 restores the default
/// (hardware concurrency).
void set_thread_count(unsigned count);
unsigned thread_count();

namespace detail {
void run_chunks(Index chunks, unsigned workers, const std::function<void(Index, unsigned)>& task);
}

/// Number of workers parallel_for will use for a range of `count` items.
inline unsigned worker_count(Index count, Index grain) {
  const Index chunks = grain > 0 ? (count + grain - 1) / grain : 1;
  return static_cast<unsigned>(std::clamp<Index>(chunks, 1, thread_count()));
}

/// Calls body(lo, hi, worker) over [begin, end) in chunks of `grain`. Each worker
/// id in [0, worker_count(end - begin, grain)) is used by at most one thread at a
/// time, so per-worker scratch is safe. Chunk assignment is dynamic; bodies must
/// write disjoint outputs or use order-independent reductions.
template <typename Body>
void parallel_for(Index begin, Index end, Index grain, Body&& body) {
  if (end <= begin) return;
  grain = std::max<Index>(grain, 1);
  const Index count = end - begin;
  const Index chunks = (count + grain - 1) / grain;
  const unsigned workers = worker_count(count, grain);
  if (workers <= 1) {
    body(begin, end, 0u);
    return;
  }
  detail::run_chunks(chunks, workers, [&](Index chunk, unsigned worker) {
    const Index lo = begin + chunk * grain;
    body(lo, std::min(end, lo + grain), worker);
  });
}

}  // namespace depthdist
