#pragma once

#include <cstddef>
#include <functional>

namespace igb {

/// Worker count from the IGB_WORKERS environment variable, else the
/// hardware concurrency. Always at least 1.
std::size_t default_workers();

/// Overrides the worker count for the calling process (0 restores the default).
void set_workers(std::size_t workers);
std::size_t workers();

/// Runs body(i) for i in [0, count) on the worker pool. Each index is handled
/// exactly once and results must be written to per-index slots, so the output
/// never depends on the worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace igb
