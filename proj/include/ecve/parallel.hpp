#pragma once

#include <cstddef>
#include <functional>

namespace ecve {

/// Resolves a worker count: an explicit positive request wins, then the
/// ECVE_THREADS environment variable, then hardware concurrency.
std::size_t resolve_threads(std::size_t requested = 0);

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
/// executed exactly once; the first exception thrown by any body is rethrown
/// on the calling thread after all workers finish.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)> &body);

} // namespace ecve
