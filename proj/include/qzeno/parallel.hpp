#pragma once

#include <cstddef>
#include <functional>

namespace qzeno {

/// Name of the environment variable selecting the worker thread count.
inline constexpr const char* kThreadsEnv = "QZENO_THREADS";

/// Worker threads used by the quadrature engine: the value set with
/// set_thread_count(), else QZENO_THREADS, else the hardware concurrency.
std::size_t thread_count();

/// 0 restores the environment default.
void set_thread_count(std::size_t n);

/// Calls `task(i)` for i in [0, n) on up to thread_count() threads. Tasks are
/// claimed dynamically; callers must write results to per-index slots. The
/// first exception thrown by any task is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task);

}  // namespace qzeno
