#pragma once

#include <thread>
#include <vector>

#include "carleman/types.hpp"

namespace carleman {

/// Runs fn(begin, end) over fixed-size chunks of [0, total). Chunk boundaries
/// do not depend on the thread count, so chunk-local reductions combined in
/// chunk order are bit-identical for any number of threads.
template <class Fn>
void parallel_chunks(Index total, int threads, Fn&& fn) {
  constexpr Index kChunk = 2048;
  const Index nchunks = (total + kChunk - 1) / kChunk;
  if (threads <= 1 || nchunks <= 1) {
    for (Index c = 0; c < nchunks; ++c)
      fn(c, c * kChunk, std::min(total, (c + 1) * kChunk));
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      for (Index c = t; c < nchunks; c += threads)
        fn(c, c * kChunk, std::min(total, (c + 1) * kChunk));
    });
  }
  for (auto& th : pool) th.join();
}

inline Index chunk_count(Index total) { return (total + 2047) / 2048; }

}  // namespace carleman
