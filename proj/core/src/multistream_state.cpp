#include "meps/multistream_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "meps/errors.hpp"

namespace meps {
namespace {

double effective_concentration(double c) { return (c < 0.0 && c >= -kConcentrationFloor) ? 0.0 : c; }

}  // namespace

LabelSet::LabelSet(std::vector<std::string> ids, std::vector<double> weights)
    : ids_(std::move(ids)), weights_(std::move(weights)) {
  if (ids_.empty() || ids_.size() != weights_.size()) {
    throw MepsError(ErrorKind::kInvalidArgument, "label set needs one weight per label and at least one label");
  }
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw MepsError(ErrorKind::kInvalidArgument, "label weights must be >= 0");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw MepsError(ErrorKind::kInvalidArgument, "label weights must sum to 1");
  }
}

LabelSet LabelSet::uniform(std::size_t count) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < count; ++i) ids.push_back("a" + std::to_string(i + 1));
  return LabelSet(std::move(ids), std::vector<double>(count, 1.0 / double(count)));
}

ScalarField gravity_potential(const TorusGrid& grid, const LabelSet& labels, const std::vector<Stream>& streams,
                              double epsilon) {
  ScalarField source(grid, -1.0);
  for (std::size_t i = 0; i < streams.size(); ++i) source += labels.weight(i) * streams[i].concentration;
  return poisson_solve(source, epsilon);
}

MepsState make_state(double time, const TorusGrid& grid, LabelSet labels, double epsilon,
                     std::vector<Stream> streams) {
  if (!(epsilon > 0.0)) throw MepsError(ErrorKind::kInvalidArgument, "epsilon must be positive");
  if (streams.size() != labels.size()) {
    throw MepsError(ErrorKind::kInvalidArgument, "one stream per label is required");
  }
  ScalarField psi = gravity_potential(grid, labels, streams, epsilon);
  return MepsState{time, grid, std::move(labels), epsilon, std::move(streams), std::move(psi)};
}

ScalarField total_concentration(const MepsState& state) {
  ScalarField rho(state.grid);
  for (std::size_t i = 0; i < state.streams.size(); ++i) {
    rho += state.labels.weight(i) * state.streams[i].concentration;
  }
  return rho;
}

VectorField velocity(const MepsState& state, std::size_t label) {
  const Stream& s = state.streams.at(label);
  VectorField v = grad(s.potential);
  v += s.drift;
  return v;
}

VectorField momentum(const MepsState& state, std::size_t label) {
  return state.streams.at(label).concentration * velocity(state, label);
}

VectorField acceleration(const MepsState& state) { return -1.0 * grad(state.psi); }

double total_mass(const MepsState& state) { return integrate(total_concentration(state)); }

double kinetic_energy(const MepsState& state) {
  double sum = 0.0;
  for (std::size_t i = 0; i < state.streams.size(); ++i) {
    sum += state.labels.weight(i) * 0.5 *
           integrate(state.streams[i].concentration * norm_squared(velocity(state, i)));
  }
  return sum;
}

double field_energy(const MepsState& state) {
  return 0.5 * state.epsilon * integrate(norm_squared(grad(state.psi)));
}

double energy(const MepsState& state) { return kinetic_energy(state) - field_energy(state); }

double gauss_residual(const MepsState& state) {
  ScalarField r = state.epsilon * laplacian(state.psi);
  r -= total_concentration(state);
  r += 1.0;
  return r.max_abs();
}

Moments moments(const MepsState& state) {
  const TorusGrid& grid = state.grid;
  Moments out{VectorField(grid), SymTensorField(grid)};
  const int d = grid.dim();
  for (std::size_t a = 0; a < state.streams.size(); ++a) {
    const VectorField v = velocity(state, a);
    ScalarField wc(grid);
    const auto& c = state.streams[a].concentration;
    for (std::size_t p = 0; p < grid.size(); ++p) wc[p] = state.labels.weight(a) * effective_concentration(c[p]);
    for (int i = 0; i < d; ++i) {
      out.first[i] += wc * v[i];
      for (int j = i; j < d; ++j) out.second(i, j) += wc * v[i] * v[j];
    }
  }
  return out;
}

bool SubsolutionReport::all() const { return std::all_of(holds.begin(), holds.end(), [](bool b) { return b; }); }

SubsolutionReport subsolution_check(const MepsState& state, double tol) {
  Moments m = moments(state);
  const int d = state.grid.dim();
  SymTensorField excess = m.second;
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) excess(i, j) -= m.first[i] * m.first[j];
  }
  const ScalarField lowest = min_eigenvalue_field(excess);
  SubsolutionReport report{std::vector<bool>(lowest.size()), lowest.min()};
  for (std::size_t p = 0; p < lowest.size(); ++p) report.holds[p] = lowest[p] >= -tol;
  return report;
}

std::vector<Violation> validate(const MepsState& state) {
  std::vector<Violation> out;
  if (!(state.epsilon > 0.0)) out.push_back({"positive epsilon", state.epsilon, 0, std::nullopt});

  bool finite = state.psi.all_finite();
  for (const auto& s : state.streams) finite = finite && s.concentration.all_finite() && s.potential.all_finite();
  if (!finite) {
    out.push_back({"finite values", std::numeric_limits<double>::quiet_NaN(), 0, std::nullopt});
    return out;
  }

  Violation worst{"negative concentration", 0.0, 0, std::nullopt};
  for (std::size_t a = 0; a < state.streams.size(); ++a) {
    const auto& c = state.streams[a].concentration;
    for (std::size_t p = 0; p < c.size(); ++p) {
      if (c[p] < worst.worst_value) worst = {worst.invariant, c[p], p, a};
    }
  }
  if (worst.worst_value < -kConcentrationFloor) out.push_back(worst);

  ScalarField residual = state.epsilon * laplacian(state.psi);
  residual -= total_concentration(state);
  residual += 1.0;
  std::size_t at = 0;
  for (std::size_t p = 0; p < residual.size(); ++p) {
    if (std::abs(residual[p]) > std::abs(residual[at])) at = p;
  }
  if (std::abs(residual[at]) > kGaussTolerance) out.push_back({"gauss residual", residual[at], at, std::nullopt});

  const double psi_mean = state.psi.mean();
  if (std::abs(psi_mean) > kGaugeTolerance) out.push_back({"zero-mean psi", psi_mean, 0, std::nullopt});

  const double mass = total_mass(state);
  if (std::abs(mass - 1.0) > kMassTolerance) out.push_back({"total mass", mass, 0, std::nullopt});
  return out;
}

std::string describe(const std::vector<Violation>& violations) {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    const auto& v = violations[i];
    if (i) os << "; ";
    os << v.invariant << " (worst " << v.worst_value << " at point " << v.point;
    if (v.label) os << ", label " << *v.label;
    os << ")";
  }
  return os.str();
}

void check_time_grid(const Trajectory& trajectory) {
  const auto& states = trajectory.states;
  auto fail = [](const std::string& what) { throw MepsError(ErrorKind::kValidationFailed, "trajectory: " + what); };
  if (states.size() < 2) fail("needs at least two samples");
  if (!(trajectory.horizon > 0.0) || !(trajectory.dt > 0.0)) fail("horizon and dt must be positive");
  const double tol = 1e-12 * std::max(1.0, trajectory.horizon);
  if (std::abs(states.front().time) > tol) fail("first sample is not at t = 0");
  if (std::abs(states.back().time - trajectory.horizon) > tol) fail("last sample is not at t = T");
  for (std::size_t k = 0; k < states.size(); ++k) {
    if (std::abs(states[k].time - double(k) * trajectory.dt) > tol) fail("samples are not uniformly spaced");
    if (!(states[k].grid == states.front().grid) || !(states[k].labels == states.front().labels) ||
        states[k].epsilon != states.front().epsilon) {
      fail("samples do not share grid, labels and epsilon");
    }
  }
}

}  // namespace meps
