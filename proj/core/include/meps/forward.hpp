#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "meps/multistream_state.hpp"

namespace meps {

struct Scenario {
  std::string name;
  MepsState initial;
  double horizon = 0.0;
  double delta = 0.0;
};

/// Two streams of weight 1/2, c = 1, drifts +u and -u, psi = 0. Exact steady solution.
Scenario scenario_counterflow(double u, double horizon, int n, double epsilon);
/// Counterflow with c_i(0) = 1 + (-1)^i delta sin(2 pi x), i = 1, 2.
Scenario scenario_perturbed(double u, double delta, double horizon, int n, double epsilon);
/// One stream with v(0) = drift + amplitude sin(2 pi x).
Scenario scenario_single_stream(double amplitude, double drift, double horizon, int n, double epsilon);
/// d = 2: three uniform streams with speed `speed` at 120 degree spacing. Exact steady solution.
Scenario scenario_tristream(double speed, double horizon, int n, double epsilon);

struct StreamRate {
  ScalarField concentration;
  ScalarField potential;
};

/// Time derivative of (c_i, periodic theta_i) under the Hamilton-Jacobi form:
///   d theta_i/dt = -|grad theta_i + drift_i|^2 / 2 - psi   (x-constant part removed)
///   d c_i/dt     = -div(c_i v_i)
/// with psi re-solved from the Gauss law. Drifts do not change.
std::vector<StreamRate> rhs(const MepsState& state, bool dealiased = false);

struct ForwardOptions {
  double cfl = 0.25;
  std::optional<double> dt;  // overrides the CFL rule; rounded so T/dt is an integer
  bool dealiased = true;
  double blowup_threshold = 1e6;
};

/// dt = min(cfl h / (v_max + 1), T / 16), then shrunk so that T / dt is an integer.
double forward_step(const Scenario& scenario, const ForwardOptions& options);

/// Classical RK4. Stored states carry a freshly solved psi and pass validate().
/// Throws MepsError with kBlowUp, kNegativeConcentration or kValidationFailed.
Trajectory integrate_forward(const Scenario& scenario, const ForwardOptions& options = {});

struct SpectralCondition {
  double margin;       // min of 1/(T - t) - lambda_max(grad v + grad v^T)
  double time;
  std::size_t point;
  std::size_t label;
};
/// Evaluated on every sample except t = T, where the bound is vacuous.
SpectralCondition check_condition_431(const Trajectory& trajectory);

/// min over unit w of max_i v_i . w. Positive iff 0 is interior to the hull of
/// the velocities, and then equal to the radius of the largest centred ball inside it.
double inclusion_radius(std::span<const Vec2> velocities, int dim);

struct AbsorbingCondition {
  bool absorbing;
  double margin;
  std::size_t point;
};
AbsorbingCondition check_weakly_absorbing(const MepsState& state);

struct HypothesisReport {
  double spectral_margin = 0.0;
  bool absorbing = false;
  double absorbing_margin = 0.0;
  double worst_spectral_time = 0.0;
  double worst_absorbing_time = 0.0;

  bool spectral_ok() const { return spectral_margin > 0.0; }
  bool ok() const { return spectral_ok() && absorbing; }
};
HypothesisReport check_hypotheses(const Trajectory& trajectory);

}  // namespace meps
