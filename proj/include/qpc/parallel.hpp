#pragma once

#include <cstddef>
#include <functional>

namespace qpc {

/// Worker count used by parallel_for; defaults to the hardware concurrency.
std::size_t worker_count();
void set_worker_count(std::size_t n);

/// Runs body(i) for i in [0, n). Indices are split into contiguous chunks,
/// one per worker; bodies must only write to their own output slots, which
/// keeps results independent of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace qpc
