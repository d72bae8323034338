#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "meps/torus_field.hpp"

namespace meps {

/// Finite label space with probability weights.
class LabelSet {
 public:
  LabelSet(std::vector<std::string> ids, std::vector<double> weights);
  static LabelSet uniform(std::size_t count);

  std::size_t size() const noexcept { return ids_.size(); }
  const std::string& id(std::size_t i) const noexcept { return ids_[i]; }
  double weight(std::size_t i) const noexcept { return weights_[i]; }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  std::vector<std::string> ids_;
  std::vector<double> weights_;
};

/// One stream: v = grad(potential) + drift, where potential is periodic and
/// drift is the constant (spatial mean) velocity.
struct Stream {
  ScalarField concentration;
  ScalarField potential;
  Vec2 drift{0.0, 0.0};
};

struct MepsState {
  double time = 0.0;
  TorusGrid grid;
  LabelSet labels;
  double epsilon = 1.0;
  std::vector<Stream> streams;
  ScalarField psi;
};

/// Concentrations in [-kConcentrationFloor, 0) are read as 0 by diagnostics and
/// anything below fails validation.
inline constexpr double kConcentrationFloor = 1e-10;
inline constexpr double kGaussTolerance = 1e-8;
inline constexpr double kMassTolerance = 1e-10;
inline constexpr double kGaugeTolerance = 1e-12;

/// Builds a state and solves psi from epsilon Lap(psi) = sum_i mu_i c_i - 1.
MepsState make_state(double time, const TorusGrid& grid, LabelSet labels, double epsilon,
                     std::vector<Stream> streams);

ScalarField total_concentration(const MepsState& state);
ScalarField gravity_potential(const TorusGrid& grid, const LabelSet& labels, const std::vector<Stream>& streams,
                              double epsilon);

VectorField velocity(const MepsState& state, std::size_t label);
VectorField momentum(const MepsState& state, std::size_t label);
/// E = -grad(psi).
VectorField acceleration(const MepsState& state);

double total_mass(const MepsState& state);
double kinetic_energy(const MepsState& state);
/// epsilon * int |grad psi|^2 / 2.
double field_energy(const MepsState& state);
/// kinetic_energy - field_energy, the conserved combination.
double energy(const MepsState& state);
double gauss_residual(const MepsState& state);

struct Moments {
  VectorField first;       // V = sum mu c v
  SymTensorField second;   // M = sum mu c v (x) v
};
Moments moments(const MepsState& state);

struct SubsolutionReport {
  std::vector<bool> holds;   // per grid point
  double min_eigenvalue;     // of M - V (x) V over the grid
  bool all() const;
};
SubsolutionReport subsolution_check(const MepsState& state, double tol);

struct Violation {
  std::string invariant;
  double worst_value;
  std::size_t point;
  std::optional<std::size_t> label;
};
/// Empty iff every state invariant holds.
std::vector<Violation> validate(const MepsState& state);
std::string describe(const std::vector<Violation>& violations);

/// Time-sampled states on [0, T] with uniform spacing dt.
struct Trajectory {
  std::vector<MepsState> states;
  double horizon = 0.0;
  double dt = 0.0;
  bool dealiased = false;

  const MepsState& initial() const { return states.front(); }
  const MepsState& final() const { return states.back(); }
  std::size_t intervals() const noexcept { return states.size() - 1; }
};

/// Throws MepsError(kValidationFailed) if the time grid or shared metadata is broken.
void check_time_grid(const Trajectory& trajectory);

}  // namespace meps
