#pragma once

#include <functional>

namespace inflap {

/// Worker count: INFLAP_THREADS when set (>= 1), else the hardware concurrency.
int worker_count();

/// Calls body(begin, end) on disjoint contiguous chunks of [0, n). Each index
/// is visited exactly once, so per-index writes are order independent.
void parallel_for(int n, const std::function<void(int, int)>& body);

}  // namespace inflap
