#pragma once

#include <cstddef>
#include <functional>

namespace locop {

// Worker cap from LOCOP_THREADS (unset: hardware concurrency, 0: serial).
std::size_t worker_count();

// Runs body(i) for i in [0, n). Tasks must write to disjoint outputs; the
// caller merges results in index order so output never depends on scheduling.
// The first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace locop
