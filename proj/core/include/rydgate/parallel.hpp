#pragma once

#include <functional>

namespace rydgate {

// Runs fn(0..n-1) on up to `workers` threads (0 = hardware concurrency).
// Callers must write results into per-index slots so that gathered output is
// independent of scheduling; this is what keeps multi-threaded runs
// bit-identical to single-threaded ones.
void parallelFor(int n, int workers, const std::function<void(int)>& fn);

int resolveWorkerCount(int workers);

}  // namespace rydgate
