#pragma once

#include <span>
#include <vector>

#include "meps/multistream_state.hpp"

namespace meps {

struct PrimalValue {
  double kinetic_part = 0.0;  // int_{Q'} c |v|^2 / 2
  double field_part = 0.0;    // int_Q epsilon |E|^2 / 2
  double total = 0.0;
};

/// Trapezoid in t, grid quadrature in x, mu-weighted over labels. The kinetic
/// integrand |q|^2/(2c) is evaluated as c|v|^2/2; throws
/// MepsError(kInfeasibleKineticTerm) where c < 0 carries momentum.
PrimalValue primal_action(const Trajectory& trajectory);

/// int c_T theta(T) - c_0 theta(0) d mu dx.
double boundary_term_two_point(const LabelSet& labels, std::span<const ScalarField> theta0,
                               std::span<const ScalarField> thetaT, std::span<const ScalarField> c0,
                               std::span<const ScalarField> cT);

/// -int c_0 theta(0) + q_0 . A(0) d mu dx.
double boundary_term_ivp(const LabelSet& labels, std::span<const ScalarField> theta0,
                         std::span<const VectorField> a0, std::span<const ScalarField> c0,
                         std::span<const VectorField> q0);

/// Weak-form residuals, each the largest |pairing| over the test battery.
struct ResidualReport {
  double continuity = 0.0;
  double gauss = 0.0;
  double momentum = 0.0;
};

/// Fixed battery, version 1: 8 real Fourier modes times 4 time factors that
/// vanish at t = T: (T-t), t(T-t), t^2(T-t), (T-t)^2. Vector tests use each
/// scalar test along every coordinate axis.
inline constexpr int kResidualBatteryVersion = 1;
inline constexpr int kBatterySpatialCount = 8;
inline constexpr int kBatteryTimeCount = 4;

ResidualReport weak_residuals(const Trajectory& trajectory);

}  // namespace meps
