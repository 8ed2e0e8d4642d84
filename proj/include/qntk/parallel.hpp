#pragma once

#include <cstddef>
#include <functional>

namespace qntk {

/// Worker count: QNTK_LAB_THREADS when set and positive, else hardware concurrency.
std::size_t worker_count();

/// Runs f(0..n-1) on up to worker_count() threads. Each index is visited once;
/// callers write into preallocated slots so the result is schedule-independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

}  // namespace qntk
