// SPDX-License-Identifier: Apache-2.0
//
// Minimal worker pool. All parallel loops index into preallocated output
// slots, so results are deterministic regardless of scheduling. KBM_THREADS
// caps the pool.

#pragma once

#include <functional>

namespace kbm {

// Worker count: min(hardware_concurrency, KBM_THREADS if set), at least 1.
int thread_count();

// Runs fn(i) for i in [0, n) across the pool. Exceptions are captured and
// the first one rethrown after all workers join.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace kbm
