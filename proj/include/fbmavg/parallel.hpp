#pragma once

#include <exception>
#include <functional>

namespace fbmavg {

/// Default worker count: FBMAVG_THREADS if set, else hardware concurrency.
int default_thread_count();

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = default).
/// Results must be written to per-index slots: the split is static, so a
/// deterministic per-index computation gives identical output for any
/// thread count. The first exception thrown by a body is rethrown.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

} // namespace fbmavg
