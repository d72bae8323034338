#pragma once

#include <cstddef>
#include <vector>

namespace meps {

/// Weights for `intervals + 1` uniform samples with spacing dt.
std::vector<double> trapezoid_weights(std::size_t intervals, double dt);

/// Composite Simpson (3/8 rule on the last three intervals when the count is odd).
/// Exact for cubics; falls back to the trapezoid rule for a single interval.
std::vector<double> simpson_weights(std::size_t intervals, double dt);

}  // namespace meps
