#include "meps/action.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "meps/errors.hpp"
#include "meps/time_quadrature.hpp"

namespace meps {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Real Fourier mode cos or sin of 2 pi k.x.
struct SpatialMode {
  std::array<int, 2> k;
  bool sine;
};

std::vector<SpatialMode> battery_modes(int dim) {
  if (dim == 1) {
    return {{{0, 0}, false}, {{1, 0}, false}, {{1, 0}, true}, {{2, 0}, false},
            {{2, 0}, true},  {{3, 0}, false}, {{3, 0}, true}, {{4, 0}, false}};
  }
  return {{{0, 0}, false}, {{1, 0}, false}, {{1, 0}, true},  {{0, 1}, false},
          {{0, 1}, true},  {{1, 1}, false}, {{1, -1}, true}, {{2, 1}, false}};
}

struct ModeField {
  ScalarField value;
  VectorField gradient;
};

ModeField evaluate_mode(const TorusGrid& grid, const SpatialMode& m) {
  ModeField out{ScalarField(grid), VectorField(grid)};
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Vec2 x = grid.point(p);
    const double phase = kTwoPi * (m.k[0] * x[0] + m.k[1] * x[1]);
    const double value = m.sine ? std::sin(phase) : std::cos(phase);
    const double slope = m.sine ? std::cos(phase) : -std::sin(phase);
    out.value[p] = value;
    for (int a = 0; a < grid.dim(); ++a) out.gradient[a][p] = kTwoPi * m.k[a] * slope;
  }
  return out;
}

double time_factor(int which, double t, double horizon) {
  switch (which) {
    case 0: return horizon - t;
    case 1: return t * (horizon - t);
    case 2: return t * t * (horizon - t);
    default: return (horizon - t) * (horizon - t);
  }
}

double time_factor_rate(int which, double t, double horizon) {
  switch (which) {
    case 0: return -1.0;
    case 1: return horizon - 2.0 * t;
    case 2: return 2.0 * t * horizon - 3.0 * t * t;
    default: return -2.0 * (horizon - t);
  }
}

}  // namespace

PrimalValue primal_action(const Trajectory& trajectory) {
  check_time_grid(trajectory);
  const auto w = trapezoid_weights(trajectory.intervals(), trajectory.dt);
  PrimalValue out;
  for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
    const MepsState& s = trajectory.states[k];
    for (std::size_t a = 0; a < s.streams.size(); ++a) {
      const auto& c = s.streams[a].concentration;
      const ScalarField speed2 = norm_squared(velocity(s, a));
      for (std::size_t p = 0; p < c.size(); ++p) {
        if (c[p] < -kConcentrationFloor && speed2[p] > 0.0) {
          throw MepsError(ErrorKind::kInfeasibleKineticTerm,
                          "momentum on negative concentration at t = " + std::to_string(s.time));
        }
      }
      out.kinetic_part += w[k] * s.labels.weight(a) * 0.5 * integrate(c * speed2);
    }
    out.field_part += w[k] * field_energy(s);
  }
  out.total = out.kinetic_part + out.field_part;
  return out;
}

double boundary_term_two_point(const LabelSet& labels, std::span<const ScalarField> theta0,
                               std::span<const ScalarField> thetaT, std::span<const ScalarField> c0,
                               std::span<const ScalarField> cT) {
  double sum = 0.0;
  for (std::size_t a = 0; a < labels.size(); ++a) {
    sum += labels.weight(a) * (integrate(cT[a] * thetaT[a]) - integrate(c0[a] * theta0[a]));
  }
  return sum;
}

double boundary_term_ivp(const LabelSet& labels, std::span<const ScalarField> theta0,
                         std::span<const VectorField> a0, std::span<const ScalarField> c0,
                         std::span<const VectorField> q0) {
  double sum = 0.0;
  for (std::size_t a = 0; a < labels.size(); ++a) {
    sum -= labels.weight(a) * (integrate(c0[a] * theta0[a]) + integrate(dot(q0[a], a0[a])));
  }
  return sum;
}

ResidualReport weak_residuals(const Trajectory& trajectory) {
  check_time_grid(trajectory);
  const MepsState& first = trajectory.initial();
  const TorusGrid& grid = first.grid;
  const int d = grid.dim();
  const std::size_t labels = first.labels.size();
  const double horizon = trajectory.horizon;
  const auto w = simpson_weights(trajectory.intervals(), trajectory.dt);

  std::vector<ModeField> modes;
  for (const auto& m : battery_modes(d)) modes.push_back(evaluate_mode(grid, m));
  const std::size_t nm = modes.size();

  // Per-sample spatial integrals; the time factors are applied afterwards.
  //   cont_rate[a][m]  = int c phi          (pairs with d/dt of the time factor)
  //   cont_flux[a][m]  = int q . grad phi
  //   mom_rate[a][j][m] = int q_j phi
  //   mom_flux[a][j][m] = int c v_j (v . grad phi) + c phi E_j
  //   gauss[m]         = int phi (1 - rho) + epsilon E . grad phi
  const std::size_t samples = trajectory.states.size();
  std::vector<double> cont_rate(samples * labels * nm), cont_flux(cont_rate.size());
  std::vector<double> mom_rate(samples * labels * d * nm), mom_flux(mom_rate.size());
  std::vector<double> gauss(samples * nm);
  auto ci = [&](std::size_t k, std::size_t a, std::size_t m) { return (k * labels + a) * nm + m; };
  auto mi = [&](std::size_t k, std::size_t a, int j, std::size_t m) {
    return ((k * labels + a) * d + std::size_t(j)) * nm + m;
  };

  for (std::size_t k = 0; k < samples; ++k) {
    const MepsState& s = trajectory.states[k];
    const VectorField e = acceleration(s);
    ScalarField deficit = -1.0 * total_concentration(s);
    deficit += 1.0;
    for (std::size_t m = 0; m < nm; ++m) {
      ScalarField g = modes[m].value * deficit;
      g += s.epsilon * dot(e, modes[m].gradient);
      gauss[k * nm + m] = integrate(g);
    }
    for (std::size_t a = 0; a < labels; ++a) {
      const ScalarField& c = s.streams[a].concentration;
      const VectorField v = velocity(s, a);
      const VectorField q = c * v;
      for (std::size_t m = 0; m < nm; ++m) {
        const ModeField& phi = modes[m];
        cont_rate[ci(k, a, m)] = integrate(c * phi.value);
        cont_flux[ci(k, a, m)] = integrate(dot(q, phi.gradient));
        const ScalarField transport = dot(v, phi.gradient);
        for (int j = 0; j < d; ++j) {
          mom_rate[mi(k, a, j, m)] = integrate(q[j] * phi.value);
          mom_flux[mi(k, a, j, m)] = integrate(q[j] * transport + c * phi.value * e[j]);
        }
      }
    }
  }

  ResidualReport out;
  for (int f = 0; f < kBatteryTimeCount; ++f) {
    for (std::size_t m = 0; m < nm; ++m) {
      double g = 0.0;
      for (std::size_t k = 0; k < samples; ++k) g += w[k] * time_factor(f, trajectory.states[k].time, horizon) * gauss[k * nm + m];
      out.gauss = std::max(out.gauss, std::abs(g));

      const double phi0 = time_factor(f, 0.0, horizon);
      for (std::size_t a = 0; a < labels; ++a) {
        double r = -phi0 * cont_rate[ci(0, a, m)];
        for (std::size_t k = 0; k < samples; ++k) {
          const double t = trajectory.states[k].time;
          r -= w[k] * (time_factor_rate(f, t, horizon) * cont_rate[ci(k, a, m)] +
                       time_factor(f, t, horizon) * cont_flux[ci(k, a, m)]);
        }
        out.continuity = std::max(out.continuity, std::abs(r));

        for (int j = 0; j < d; ++j) {
          double rm = -phi0 * mom_rate[mi(0, a, j, m)];
          for (std::size_t k = 0; k < samples; ++k) {
            const double t = trajectory.states[k].time;
            rm -= w[k] * (time_factor_rate(f, t, horizon) * mom_rate[mi(k, a, j, m)] +
                          time_factor(f, t, horizon) * mom_flux[mi(k, a, j, m)]);
          }
          out.momentum = std::max(out.momentum, std::abs(rm));
        }
      }
    }
  }
  return out;
}

}  // namespace meps
