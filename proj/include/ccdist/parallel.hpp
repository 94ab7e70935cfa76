// ccdist -- deterministic parallel loop over independent work items.
#pragma once

#include <functional>

namespace ccdist {

// Thread cap: min(hardware, CCDIST_THREADS when set). Always >= 1.
int max_threads();

// Runs fn(i) for i in [0, n). Each item must write only to its own slot;
// results are merged by the caller in index order, so the outcome does not
// depend on the thread count.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace ccdist
