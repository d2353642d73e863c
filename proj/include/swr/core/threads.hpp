#pragma once

#include <cstddef>
#include <functional>

namespace swr {

// Worker count from SWR_THREADS (positive integer), defaulting to the
// machine parallelism. Read on every call so tests can change it.
std::size_t thread_count();

// Runs fn(0) .. fn(n-1) on up to thread_count() workers. Tasks must be
// independent and write only to their own output slots; under that contract
// the result is identical for every thread count and schedule. Exceptions
// thrown by tasks are rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace swr
