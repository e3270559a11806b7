#pragma once

#include <cstddef>
#include <functional>

namespace dagscore {

/// Worker count: DAGSCORE_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
int thread_count();

/// Runs body(i) for i in [0, count) on up to thread_count() threads. Each
/// index is visited exactly once; the first exception thrown is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace dagscore
