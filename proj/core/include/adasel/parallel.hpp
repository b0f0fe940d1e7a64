#pragma once

#include <cstddef>
#include <functional>

namespace adasel {

/// Worker cap for internal parallel loops. Reads ADASEL_THREADS (positive
/// integer) and falls back to the hardware concurrency. Throws ConfigInvalid
/// when the variable is set to something that is not a positive integer.
int max_threads();

/// Runs body(i) for i in [0, count) on up to max_threads() workers. Each index
/// is visited exactly once; the first exception thrown by any body is
/// rethrown on the calling thread after all workers have joined.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace adasel
