#include "meps/forward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "meps/errors.hpp"

namespace meps {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool condition, const std::string& message) {
  if (!condition) throw MepsError(ErrorKind::kInvalidArgument, message);
}

Scenario finish(std::string name, MepsState initial, double horizon, double delta) {
  require(horizon > 0.0, "horizon must be positive");
  auto violations = validate(initial);
  if (!violations.empty()) {
    throw MepsError(ErrorKind::kValidationFailed, name + " initial state: " + describe(violations));
  }
  return Scenario{std::move(name), std::move(initial), horizon, delta};
}

std::vector<StreamRate> rates_for(const TorusGrid& grid, const LabelSet& labels, double epsilon,
                                  const std::vector<Stream>& streams, bool dealiased) {
  const ScalarField psi = gravity_potential(grid, labels, streams, epsilon);
  std::vector<StreamRate> out;
  out.reserve(streams.size());
  for (const Stream& s : streams) {
    VectorField v = grad(s.potential);
    v += s.drift;
    ScalarField dtheta = -0.5 * norm_squared(v);
    dtheta -= psi;
    dtheta += -dtheta.mean();
    ScalarField dc = -div(s.concentration * v);
    if (dealiased) {
      dtheta = dealias(dtheta);
      dc = dealias(dc);
    }
    out.push_back({std::move(dc), std::move(dtheta)});
  }
  return out;
}

std::vector<Stream> advance(const std::vector<Stream>& base, const std::vector<StreamRate>& rate, double h) {
  std::vector<Stream> out = base;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].concentration += h * rate[i].concentration;
    out[i].potential += h * rate[i].potential;
  }
  return out;
}

double max_speed(const MepsState& state) {
  double vmax = 0.0;
  for (std::size_t a = 0; a < state.streams.size(); ++a) vmax = std::max(vmax, velocity(state, a).max_abs());
  return vmax;
}

}  // namespace

Scenario scenario_counterflow(double u, double horizon, int n, double epsilon) {
  require(u != 0.0, "counterflow speed must be nonzero");
  const TorusGrid grid(1, n);
  std::vector<Stream> streams;
  streams.push_back({ScalarField(grid, 1.0), ScalarField(grid), {u, 0.0}});
  streams.push_back({ScalarField(grid, 1.0), ScalarField(grid), {-u, 0.0}});
  return finish("counterflow", make_state(0.0, grid, LabelSet::uniform(2), epsilon, std::move(streams)), horizon,
                0.0);
}

Scenario scenario_perturbed(double u, double delta, double horizon, int n, double epsilon) {
  require(u != 0.0, "counterflow speed must be nonzero");
  require(delta >= 0.0 && delta < 0.5, "perturbation amplitude must lie in [0, 0.5)");
  const TorusGrid grid(1, n);
  std::vector<Stream> streams;
  for (int i = 0; i < 2; ++i) {
    const double sign = i == 0 ? 1.0 : -1.0;
    auto c = ScalarField::from_function(grid, [&](Vec2 x) { return 1.0 + sign * delta * std::sin(kTwoPi * x[0]); });
    streams.push_back({std::move(c), ScalarField(grid), {sign * u, 0.0}});
  }
  return finish("perturbed", make_state(0.0, grid, LabelSet::uniform(2), epsilon, std::move(streams)), horizon,
                delta);
}

Scenario scenario_single_stream(double amplitude, double drift, double horizon, int n, double epsilon) {
  const TorusGrid grid(1, n);
  auto potential =
      ScalarField::from_function(grid, [&](Vec2 x) { return -amplitude * std::cos(kTwoPi * x[0]) / kTwoPi; });
  std::vector<Stream> streams;
  streams.push_back({ScalarField(grid, 1.0), std::move(potential), {drift, 0.0}});
  return finish("single_stream", make_state(0.0, grid, LabelSet::uniform(1), epsilon, std::move(streams)), horizon,
                0.0);
}

Scenario scenario_tristream(double speed, double horizon, int n, double epsilon) {
  require(speed != 0.0, "stream speed must be nonzero");
  const TorusGrid grid(2, n);
  std::vector<Stream> streams;
  for (int j = 0; j < 3; ++j) {
    const double angle = kTwoPi * j / 3.0;
    streams.push_back({ScalarField(grid, 1.0), ScalarField(grid), {speed * std::cos(angle), speed * std::sin(angle)}});
  }
  return finish("tristream", make_state(0.0, grid, LabelSet::uniform(3), epsilon, std::move(streams)), horizon, 0.0);
}

std::vector<StreamRate> rhs(const MepsState& state, bool dealiased) {
  auto violations = validate(state);
  if (!violations.empty()) throw MepsError(ErrorKind::kValidationFailed, describe(violations));
  return rates_for(state.grid, state.labels, state.epsilon, state.streams, dealiased);
}

double forward_step(const Scenario& scenario, const ForwardOptions& options) {
  const double horizon = scenario.horizon;
  double dt = options.dt.value_or(
      std::min(options.cfl * scenario.initial.grid.spacing() / (max_speed(scenario.initial) + 1.0), horizon / 16.0));
  require(dt > 0.0, "time step must be positive");
  const double steps = std::max(1.0, std::ceil(horizon / dt - 1e-9));
  return horizon / steps;
}

Trajectory integrate_forward(const Scenario& scenario, const ForwardOptions& options) {
  const MepsState& init = scenario.initial;
  const double dt = forward_step(scenario, options);
  const auto steps = std::size_t(std::llround(scenario.horizon / dt));

  Trajectory traj;
  traj.horizon = scenario.horizon;
  traj.dt = dt;
  traj.dealiased = options.dealiased;
  traj.states.reserve(steps + 1);
  traj.states.push_back(init);

  auto rates = [&](const std::vector<Stream>& s) {
    return rates_for(init.grid, init.labels, init.epsilon, s, options.dealiased);
  };

  std::vector<Stream> y = init.streams;
  for (std::size_t k = 1; k <= steps; ++k) {
    const auto k1 = rates(y);
    const auto k2 = rates(advance(y, k1, 0.5 * dt));
    const auto k3 = rates(advance(y, k2, 0.5 * dt));
    const auto k4 = rates(advance(y, k3, dt));
    auto combine = [dt](ScalarField& f, const ScalarField& r1, const ScalarField& r2, const ScalarField& r3,
                        const ScalarField& r4) {
      for (std::size_t p = 0; p < f.size(); ++p) f[p] += dt / 6.0 * (r1[p] + 2.0 * r2[p] + 2.0 * r3[p] + r4[p]);
    };
    for (std::size_t i = 0; i < y.size(); ++i) {
      combine(y[i].concentration, k1[i].concentration, k2[i].concentration, k3[i].concentration,
              k4[i].concentration);
      combine(y[i].potential, k1[i].potential, k2[i].potential, k3[i].potential, k4[i].potential);
    }

    const double t = k == steps ? scenario.horizon : double(k) * dt;
    std::ostringstream where;
    where << scenario.name << " at t = " << t;
    double min_c = std::numeric_limits<double>::infinity();
    for (const Stream& s : y) {
      const double size = std::max(s.concentration.max_abs(), s.potential.max_abs());
      if (!std::isfinite(size) || size > options.blowup_threshold) {
        throw MepsError(ErrorKind::kBlowUp, "field norm exceeded threshold " + where.str());
      }
      min_c = std::min(min_c, s.concentration.min());
    }
    if (min_c < -kConcentrationFloor) {
      throw MepsError(ErrorKind::kNegativeConcentration,
                      "min concentration " + std::to_string(min_c) + " " + where.str());
    }
    MepsState next = make_state(t, init.grid, init.labels, init.epsilon, y);
    auto violations = validate(next);
    if (!violations.empty()) {
      throw MepsError(ErrorKind::kValidationFailed, where.str() + ": " + describe(violations));
    }
    traj.states.push_back(std::move(next));
  }
  return traj;
}

SpectralCondition check_condition_431(const Trajectory& trajectory) {
  check_time_grid(trajectory);
  SpectralCondition worst{std::numeric_limits<double>::infinity(), 0.0, 0, 0};
  const double horizon = trajectory.horizon;
  for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
    const MepsState& s = trajectory.states[k];
    // The final sample is held to the bound of t = T - dt.
    const double t = k + 1 == trajectory.states.size() ? horizon - trajectory.dt : s.time;
    const double bound = 1.0 / (horizon - t);
    for (std::size_t a = 0; a < s.streams.size(); ++a) {
      const ScalarField lambda = max_eigenvalue_field(sym_grad(grad(s.streams[a].potential)));
      for (std::size_t p = 0; p < lambda.size(); ++p) {
        const double margin = bound - lambda[p];
        if (margin < worst.margin) worst = {margin, s.time, p, a};
      }
    }
  }
  return worst;
}

double inclusion_radius(std::span<const Vec2> velocities, int dim) {
  if (velocities.empty()) return -std::numeric_limits<double>::infinity();
  if (dim == 1) {
    double lo = velocities[0][0];
    double hi = lo;
    for (const Vec2& v : velocities) {
      lo = std::min(lo, v[0]);
      hi = std::max(hi, v[0]);
    }
    return std::min(hi, -lo);
  }
  // The support function h(w) = max_i v_i . w is minimised over the unit circle
  // either where two points tie (w orthogonal to v_i - v_j) or at w = -v_i / |v_i|.
  auto support = [&](double wx, double wy) {
    double h = -std::numeric_limits<double>::infinity();
    for (const Vec2& v : velocities) h = std::max(h, v[0] * wx + v[1] * wy);
    return h;
  };
  double best = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < velocities.size(); ++i) {
    const double ni = std::hypot(velocities[i][0], velocities[i][1]);
    if (ni > 0.0) {
      best = std::min(best, support(-velocities[i][0] / ni, -velocities[i][1] / ni));
      any = true;
    }
    for (std::size_t j = i + 1; j < velocities.size(); ++j) {
      const double ex = velocities[j][0] - velocities[i][0];
      const double ey = velocities[j][1] - velocities[i][1];
      const double len = std::hypot(ex, ey);
      if (len == 0.0) continue;
      best = std::min(best, support(-ey / len, ex / len));
      best = std::min(best, support(ey / len, -ex / len));
      any = true;
    }
  }
  // Every velocity is zero: the hull is {0}.
  return any ? best : 0.0;
}

AbsorbingCondition check_weakly_absorbing(const MepsState& state) {
  std::vector<VectorField> v;
  for (std::size_t a = 0; a < state.streams.size(); ++a) v.push_back(velocity(state, a));
  AbsorbingCondition worst{false, std::numeric_limits<double>::infinity(), 0};
  std::vector<Vec2> at(v.size());
  for (std::size_t p = 0; p < state.grid.size(); ++p) {
    for (std::size_t a = 0; a < v.size(); ++a) at[a] = v[a].at(p);
    const double r = inclusion_radius(at, state.grid.dim());
    if (r < worst.margin) worst = {false, r, p};
  }
  worst.absorbing = worst.margin > 0.0;
  return worst;
}

HypothesisReport check_hypotheses(const Trajectory& trajectory) {
  const SpectralCondition spectral = check_condition_431(trajectory);
  HypothesisReport report;
  report.spectral_margin = spectral.margin;
  report.worst_spectral_time = spectral.time;
  report.absorbing_margin = std::numeric_limits<double>::infinity();
  for (const MepsState& s : trajectory.states) {
    const AbsorbingCondition a = check_weakly_absorbing(s);
    if (a.margin < report.absorbing_margin) {
      report.absorbing_margin = a.margin;
      report.worst_absorbing_time = s.time;
    }
  }
  report.absorbing = report.absorbing_margin > 0.0;
  return report;
}

}  // namespace meps
