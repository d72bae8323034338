#pragma once

#include <vector>

#include "meps/torus_field.hpp"

namespace meps {

/// E . normal <= bound.
struct QpConstraint {
  Vec2 normal{0.0, 0.0};
  double bound = 0.0;
};

/// minimise |E|^2/2 + E.B over E in R^d subject to every constraint.
struct QpInstance {
  int dim = 1;
  Vec2 b{0.0, 0.0};
  std::vector<QpConstraint> constraints;
};

struct QpSolution {
  Vec2 e{0.0, 0.0};
  double k_value = 0.0;   // K = -(minimum value)
  int active = 0;         // constraints active at the optimum
  /// Uniform outward shift (distance units) that had to be applied to the
  /// normalised constraints because their intersection was empty; 0 normally.
  double relaxation = 0.0;
};

inline constexpr double kQpFeasibilityTol = 1e-10;

/// Exact solve for d <= 2: the minimiser is the projection of -B onto the
/// polyhedron, found by enumerating active sets of size <= d and checking KKT.
/// Parallel constraints with the same direction are merged (tightest kept).
QpSolution solve_pointwise_qp(const QpInstance& instance);

/// Largest normalised violation max_i (n_i . E - beta_i), <= 0 when feasible.
double qp_violation(const QpInstance& instance, Vec2 e);

}  // namespace meps
