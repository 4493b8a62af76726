#pragma once

#include <functional>

namespace ccmfbm {

/// Worker count: CCMFBM_THREADS if set to a positive integer, else hardware concurrency.
int worker_count();

/// Runs body(i) for i in [begin, end) on worker_count() threads with dynamic scheduling.
/// Each index is executed exactly once; the first exception thrown is rethrown here.
/// Results must not depend on scheduling, so bodies write only to slots owned by i.
void parallel_for(int begin, int end, const std::function<void(int)>& body);

}  // namespace ccmfbm
