#pragma once

#include <cstddef>
#include <functional>

namespace weylprior {

/// Worker count: WEYLPRIOR_THREADS when set to a positive integer, else the
/// hardware concurrency.
unsigned thread_count();

/// Runs body(i) for i in [0, n) on up to thread_count() threads. Each index
/// is visited exactly once; the first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace weylprior
