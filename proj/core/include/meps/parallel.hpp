#pragma once

#include <cstddef>
#include <functional>

namespace meps {

/// Worker count honoured by parallel_for: MEPS_THREADS if set, else hardware concurrency.
std::size_t thread_budget();

/// Calls fn(i) for i in [0, count). Callers write into disjoint slots only, so
/// results do not depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace meps
