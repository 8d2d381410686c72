#pragma once

#include <cstddef>
#include <functional>

namespace hqc {

// Worker count: HQC_THREADS when set and positive, else hardware concurrency.
int thread_count();

// Runs f(0..n-1) on up to `threads` workers (0 = thread_count()).
// The first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f, int threads = 0);

}  // namespace hqc
