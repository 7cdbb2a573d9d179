#pragma once

#include <cstddef>
#include <functional>

namespace copeq {

/// Worker count: COPEQ_THREADS if set, else `requested` if nonzero, else the
/// hardware concurrency.
unsigned resolve_threads(unsigned requested);

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Work items are
/// claimed dynamically; callers must write results by index. The first
/// exception thrown by any item is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace copeq
