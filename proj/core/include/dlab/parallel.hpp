#pragma once

#include <cstddef>
#include <functional>

namespace dlab {

/// Worker count: DIRICHLET_LAB_THREADS if set and non-zero, else hardware concurrency.
std::size_t thread_count();

/// Runs body(i) for i in [0, n) on up to thread_count() threads. Each index is handled
/// exactly once; callers write into index-owned slots so results do not depend on
/// scheduling. The first exception thrown by any body is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace dlab
