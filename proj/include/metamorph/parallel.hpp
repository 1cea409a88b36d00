#pragma once

#include <cstddef>
#include <functional>

namespace metamorph {

/// Worker count: METAMORPH_THREADS caps it, 0 or unset means hardware auto.
int worker_count();

/// Runs fn(i) for i in [0, n) on up to worker_count() threads with a static
/// block partition. fn must write only to its own slots; results are then
/// independent of the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace metamorph
