#pragma once

#include <functional>

namespace spdelab {

/// Worker count: SPDE_THREADS if set and positive, else the hardware concurrency.
int worker_count();

/// Overrides worker_count() for the current process (0 restores the default).
void set_worker_count(int n);

/// Calls fn(i) for i in [0, n) on up to worker_count() threads. Calls made from
/// inside a worker run serially, so nested loops do not oversubscribe.
/// Callers write results into per-index slots and reduce afterwards in index
/// order, which keeps results independent of the schedule.
/// The first exception thrown by any fn is rethrown after all workers stop.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace spdelab
