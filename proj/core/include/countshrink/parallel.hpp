#pragma once

#include <cstddef>
#include <functional>

namespace countshrink {

// Worker count: COUNTSHRINK_THREADS if set to a positive integer, otherwise
// std::thread::hardware_concurrency() (at least 1).
unsigned default_threads();

// Calls body(i) for i in [0, n) on up to `threads` workers (0 = default_threads()).
// Work is handed out dynamically; results must be written to per-index slots.
// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, unsigned threads = 0);

}  // namespace countshrink
