#pragma once

#include <cstddef>
#include <functional>

namespace canprint {

// Worker cap: CANPRINT_THREADS when set, otherwise hardware concurrency.
unsigned worker_count();

// Runs fn(i) for i in [0, n) on up to worker_count() threads with static
// index partitioning, so results written to preallocated slots land
// identically regardless of scheduling. Exceptions are rethrown to the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace canprint
