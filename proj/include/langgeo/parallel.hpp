#pragma once

#include <cstddef>
#include <functional>

namespace langgeo {

/// Upper bound on worker threads used by internal parallel loops.
/// Zero means "use hardware concurrency".
void set_thread_limit(unsigned threads) noexcept;
unsigned thread_limit() noexcept;

/// Reads LANGGEO_THREADS; returns 0 when unset or unparsable.
unsigned thread_limit_from_env() noexcept;

/// Runs body(i) for i in [0, count) on up to thread_limit() threads.
/// Iterations must write disjoint state. The first exception thrown by any
/// iteration is rethrown on the calling thread after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace langgeo
