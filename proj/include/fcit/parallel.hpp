#pragma once

#include <cstdint>
#include <functional>

namespace fcit {

// Global worker count for operator internals. 0 = hardware concurrency,
// 1 = strictly serial. Work is partitioned so every output element is
// produced by exactly one worker with a fixed accumulation order, which
// keeps results bitwise identical across thread counts.
void set_num_threads(int n);
int num_threads();

// Runs fn over disjoint [begin, end) chunks, possibly on worker threads.
void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t, std::int64_t)>& fn);

}  // namespace fcit
