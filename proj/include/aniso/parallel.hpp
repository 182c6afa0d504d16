#pragma once

#include <cstddef>
#include <functional>

namespace ag {

// Worker count from ANISO_GABOR_THREADS, else hardware concurrency.
unsigned thread_count();

// Runs fn(i) for i in [0, n) over thread_count() workers, block-partitioned.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

}  // namespace ag
