#pragma once

#include <cstddef>
#include <functional>

namespace cranrate {

// Worker count from CRANRATE_THREADS; defaults to the hardware concurrency.
std::size_t thread_count();

// Runs fn(i) for i in [0, n) on up to thread_count() threads. The first
// exception thrown by any task is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace cranrate
