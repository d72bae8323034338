#include "meps/time_quadrature.hpp"

#include "meps/errors.hpp"

namespace meps {

std::vector<double> trapezoid_weights(std::size_t intervals, double dt) {
  if (intervals == 0) throw MepsError(ErrorKind::kInvalidArgument, "quadrature needs at least one interval");
  std::vector<double> w(intervals + 1, dt);
  w.front() = w.back() = 0.5 * dt;
  return w;
}

std::vector<double> simpson_weights(std::size_t intervals, double dt) {
  if (intervals < 2) return trapezoid_weights(intervals, dt);
  std::vector<double> w(intervals + 1, 0.0);
  const std::size_t simpson = intervals % 2 == 0 ? intervals : intervals - 3;
  for (std::size_t k = 0; k + 2 <= simpson; k += 2) {
    w[k] += dt / 3.0;
    w[k + 1] += 4.0 * dt / 3.0;
    w[k + 2] += dt / 3.0;
  }
  if (simpson != intervals) {
    const std::size_t k = simpson;
    const double s = 3.0 * dt / 8.0;
    w[k] += s;
    w[k + 1] += 3.0 * s;
    w[k + 2] += 3.0 * s;
    w[k + 3] += s;
  }
  return w;
}

}  // namespace meps
