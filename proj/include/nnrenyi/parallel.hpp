#pragma once

#include <cstddef>
#include <functional>

namespace nnrenyi {

// Process-wide worker cap; 0 means hardware concurrency.
void set_max_threads(unsigned n);
unsigned max_threads();

// Calls fn(begin, end) over contiguous chunks of [0, n). Chunks are disjoint,
// so callers writing into preallocated per-index slots get deterministic output.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn,
                  std::size_t min_chunk = 64);

}  // namespace nnrenyi
