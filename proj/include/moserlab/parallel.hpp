#pragma once

#include <cstddef>
#include <functional>

namespace moserlab {

/// Worker count from MOSERLAB_THREADS; 1 when unset or invalid.
std::size_t worker_count();

/// Calls body(i) for i in [0, n) on up to worker_count() threads. Each index
/// runs exactly once; callers write results into slot i so the assembled
/// output does not depend on scheduling. The exception of the lowest failing index is
/// rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace moserlab
