#pragma once

#include <cstddef>
#include <functional>

namespace decseq {

// Worker count: DECSEQ_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

// Runs body(begin, end) over contiguous chunks of [0, n) on up to worker_count() threads.
void parallel_chunks(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace decseq
