#pragma once

#include <cstddef>
#include <functional>

namespace knncp {

/// Worker count used when a caller passes 0. Reads KNNCP_THREADS, falling back
/// to the hardware concurrency.
std::size_t default_workers();

/// Overrides the process-wide default (0 restores the environment lookup).
void set_default_workers(std::size_t workers);

/// Runs body(begin, end) over contiguous chunks of [0, count). Chunks are
/// assigned statically, so the partition depends only on count and workers.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t workers = 0);

} // namespace knncp
