#include "meps/dual.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "meps/action.hpp"
#include "meps/errors.hpp"
#include "meps/forward.hpp"
#include "meps/parallel.hpp"
#include "meps/pointwise_qp.hpp"
#include "meps/time_quadrature.hpp"

namespace meps {
namespace {

// d/dt at sample k: centred inside, second-order one-sided at the ends.
struct Stencil {
  std::array<std::size_t, 3> index{};
  std::array<double, 3> weight{};
  int length = 0;
};

Stencil rate_stencil(std::size_t count, std::size_t k, double dt) {
  if (count < 2) throw MepsError(ErrorKind::kInvalidArgument, "time derivative needs at least two samples");
  const std::size_t last = count - 1;
  if (count == 2) return {{0, 1, 0}, {-1.0 / dt, 1.0 / dt, 0.0}, 2};
  const double r = 0.5 / dt;
  if (k == 0) return {{0, 1, 2}, {-3.0 * r, 4.0 * r, -r}, 3};
  if (k == last) return {{last, last - 1, last - 2}, {3.0 * r, -4.0 * r, r}, 3};
  return {{k + 1, k - 1, 0}, {r, -r, 0.0}, 2};
}

template <class T, class Get>
T apply_stencil(const Stencil& s, Get get) {
  T out = s.weight[0] * get(s.index[0]);
  for (int i = 1; i < s.length; ++i) out += s.weight[i] * get(s.index[i]);
  return out;
}

Vec2 drift_rate(const DualCertificate& cert, std::size_t k, std::size_t label) {
  const Stencil s = rate_stencil(cert.slices.size(), k, cert.dt);
  Vec2 out{0.0, 0.0};
  for (int i = 0; i < s.length; ++i) {
    const Vec2& d = cert.slices[s.index[i]].a[label].drift;
    out[0] += s.weight[i] * d[0];
    out[1] += s.weight[i] * d[1];
  }
  return out;
}

ScalarField theta_rate(const DualCertificate& cert, std::size_t k, std::size_t label) {
  const CertificateSlice& slice = cert.slices[k];
  if (slice.theta_rate) return (*slice.theta_rate)[label];
  return apply_stencil<ScalarField>(rate_stencil(cert.slices.size(), k, cert.dt),
                                    [&](std::size_t j) { return cert.slices[j].theta[label]; });
}

VectorField a_rate(const DualCertificate& cert, std::size_t k, std::size_t label) {
  const CertificateSlice& slice = cert.slices[k];
  if (slice.a_rate) return (*slice.a_rate)[label];
  VectorField out = apply_stencil<VectorField>(rate_stencil(cert.slices.size(), k, cert.dt),
                                               [&](std::size_t j) { return cert.slices[j].a[label].periodic; });
  out += drift_rate(cert, k, label);
  return out;
}

void check_shape(const DualCertificate& cert) {
  const std::size_t m = cert.labels.size();
  if (cert.slices.size() < 2) throw MepsError(ErrorKind::kInvalidArgument, "certificate needs at least two slices");
  if (!(cert.dt > 0.0)) throw MepsError(ErrorKind::kInvalidArgument, "certificate dt must be positive");
  for (std::size_t k = 0; k < cert.slices.size(); ++k) {
    const CertificateSlice& s = cert.slices[k];
    if (s.theta.size() != m || s.a.size() != m) {
      throw MepsError(ErrorKind::kInvalidArgument, "certificate slice label count mismatch");
    }
    if ((s.theta_rate && s.theta_rate->size() != m) || (s.a_rate && s.a_rate->size() != m)) {
      throw MepsError(ErrorKind::kInvalidArgument, "certificate rate label count mismatch");
    }
    if (std::abs(s.time - double(k) * cert.dt) > 1e-12 * std::max(1.0, cert.horizon)) {
      throw MepsError(ErrorKind::kInvalidArgument, "certificate slices must sit at k * dt");
    }
  }
  if (std::abs(cert.slices.back().time - cert.horizon) > 1e-12 * std::max(1.0, cert.horizon)) {
    throw MepsError(ErrorKind::kInvalidArgument, "last certificate slice must be at t = T");
  }
}

struct SliceBulk {
  double psi_integral = 0.0;
  double k_integral = 0.0;
  double max_relaxation = 0.0;
  std::size_t relaxed = 0;
  std::vector<std::size_t> histogram;
};

struct BulkResult {
  std::vector<SliceBulk> slices;
  DualDiagnostics diagnostics;
};

// Per-slice integrals of psi and K(grad psi), with the eta-domain checks.
BulkResult evaluate_bulk(const DualCertificate& cert, const DualOptions& options) {
  check_shape(cert);
  const SpectralConstraint spectral = check_spectral_constraint(cert);
  if (!spectral.ok) {
    std::ostringstream msg;
    msg << "spectral constraint violated, margin " << spectral.margin;
    throw MepsError(ErrorKind::kInfeasibleCertificate, msg.str());
  }
  const std::size_t count = cert.slices.size();
  const std::size_t m = cert.labels.size();
  const int d = cert.grid.dim();

  std::vector<std::vector<ScalarField>> eta(count);
  parallel_for(count, [&](std::size_t k) {
    for (std::size_t a = 0; a < m; ++a) eta[k].push_back(compute_eta(cert, k, a));
  });

  BulkResult out;
  out.diagnostics.spectral_margin = spectral.margin;
  double min_eta = std::numeric_limits<double>::infinity();
  for (const auto& per_label : eta) {
    for (const ScalarField& e : per_label) min_eta = std::min(min_eta, e.min());
  }
  out.diagnostics.min_eta = min_eta;
  if (options.domain == DualDomain::kNonnegativeSlack) {
    if (min_eta < -kEtaTolerance) {
      std::ostringstream msg;
      msg << "eta = " << min_eta << " below -" << kEtaTolerance;
      throw MepsError(ErrorKind::kInfeasibleCertificate, msg.str());
    }
    for (auto& per_label : eta) {
      for (ScalarField& e : per_label) {
        for (double& v : e.values()) v = std::max(v, 0.0);
      }
    }
  }

  // Terminal limits: A(T) = 0, so use the first-order behaviour of (A, eta) at T.
  const std::size_t last = count - 1;
  std::vector<VectorField> terminal_a;
  std::vector<ScalarField> terminal_eta;
  const Stencil end = rate_stencil(count, last, cert.dt);
  for (std::size_t a = 0; a < m; ++a) {
    terminal_a.push_back(a_rate(cert, last, a));
    terminal_eta.push_back(apply_stencil<ScalarField>(end, [&](std::size_t j) { return eta[j][a]; }));
  }

  out.slices.resize(count);
  parallel_for(count, [&](std::size_t k) {
    const CertificateSlice& slice = cert.slices[k];
    const VectorField b = grad(slice.psi);
    std::vector<VectorField> a_full;
    for (std::size_t a = 0; a < m; ++a) a_full.push_back(slice.a[a].full());
    SliceBulk& res = out.slices[k];
    res.histogram.assign(std::size_t(d) + 1, 0);
    ScalarField k_field(cert.grid);
    QpInstance inst;
    inst.dim = d;
    for (std::size_t p = 0; p < cert.grid.size(); ++p) {
      inst.b = b.at(p);
      inst.constraints.clear();
      for (std::size_t a = 0; a < m; ++a) {
        if (k == last) {
          const double eta_t = eta[k][a][p];
          if (eta_t > kEtaTolerance) continue;
          const Vec2 rate = terminal_a[a].at(p);
          inst.constraints.push_back({{-rate[0], -rate[1]}, -terminal_eta[a][p]});
        } else {
          inst.constraints.push_back({a_full[a].at(p), eta[k][a][p]});
        }
      }
      const QpSolution sol = solve_pointwise_qp(inst);
      k_field[p] = sol.k_value;
      res.histogram[std::size_t(std::min(sol.active, d))] += 1;
      if (sol.relaxation > 0.0) {
        res.relaxed += 1;
        res.max_relaxation = std::max(res.max_relaxation, sol.relaxation);
      }
    }
    res.psi_integral = integrate(slice.psi);
    res.k_integral = integrate(k_field);
  });

  out.diagnostics.active_histogram.assign(std::size_t(d) + 1, 0);
  for (const SliceBulk& s : out.slices) {
    out.diagnostics.max_relaxation = std::max(out.diagnostics.max_relaxation, s.max_relaxation);
    out.diagnostics.relaxed_points += s.relaxed;
    for (std::size_t i = 0; i < s.histogram.size(); ++i) out.diagnostics.active_histogram[i] += s.histogram[i];
  }
  if (out.diagnostics.max_relaxation > kRelaxationTolerance) {
    std::ostringstream msg;
    msg << "pointwise constraint set empty, shift " << out.diagnostics.max_relaxation << " needed";
    throw MepsError(ErrorKind::kInfeasibleCertificate, msg.str());
  }
  return out;
}

double quadrature(const std::vector<double>& samples, const std::vector<double>& w) {
  double sum = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) sum += w[k] * samples[k];
  return sum;
}

double trapezoid(const std::vector<double>& samples, double dt) {
  return quadrature(samples, trapezoid_weights(samples.size() - 1, dt));
}

double simpson(const std::vector<double>& samples, double dt) {
  return quadrature(samples, simpson_weights(samples.size() - 1, dt));
}

double grad_psi_squared(const MepsState& s) { return integrate(norm_squared(grad(s.psi))); }

}  // namespace

VectorField DriftedVectorField::full() const {
  VectorField out = periodic;
  out += drift;
  return out;
}

ScalarField compute_eta(const DualCertificate& cert, std::size_t slice, std::size_t label) {
  const CertificateSlice& s = cert.slices.at(slice);
  const int d = cert.grid.dim();
  const SymTensorField sg = sym_grad(s.a.at(label).periodic);
  VectorField w = a_rate(cert, slice, label);
  w += grad(s.theta[label]);
  const ScalarField dtheta = theta_rate(cert, slice, label);

  ScalarField eta(cert.grid);
  for (std::size_t p = 0; p < cert.grid.size(); ++p) {
    double quad;
    double lambda;
    if (d == 1) {
      lambda = sg(0, 0)[p];
      quad = w[0][p] * w[0][p] / (1.0 - lambda);
    } else {
      const double s00 = sg(0, 0)[p];
      const double s01 = sg(0, 1)[p];
      const double s11 = sg(1, 1)[p];
      lambda = 0.5 * (s00 + s11) + std::hypot(0.5 * (s00 - s11), s01);
      const double m00 = 1.0 - s00;
      const double m11 = 1.0 - s11;
      const double m01 = -s01;
      const double det = m00 * m11 - m01 * m01;
      const double w0 = w[0][p];
      const double w1 = w[1][p];
      quad = (m11 * w0 * w0 - 2.0 * m01 * w0 * w1 + m00 * w1 * w1) / det;
    }
    if (lambda >= 1.0 - kSingularTolerance) {
      std::ostringstream msg;
      msg << "I - grad A - grad A^T not invertible at t = " << s.time << ", point " << p << ", label "
          << cert.labels.id(label) << " (lambda_max = " << lambda << ")";
      throw MepsError(ErrorKind::kSingularMatrix, msg.str());
    }
    eta[p] = -(0.5 * quad + dtheta[p]) - s.psi[p];
  }
  return eta;
}

SpectralConstraint check_spectral_constraint(const DualCertificate& cert) {
  double margin = std::numeric_limits<double>::infinity();
  for (const CertificateSlice& s : cert.slices) {
    for (const DriftedVectorField& a : s.a) {
      margin = std::min(margin, 1.0 - max_eigenvalue_field(sym_grad(a.periodic)).max());
    }
  }
  return {margin >= -kSpectralTolerance, margin};
}

DualValue dual_objective(const DualCertificate& cert, std::span<const ScalarField> c0,
                         std::span<const VectorField> q0, const DualOptions& options) {
  const BulkResult bulk = evaluate_bulk(cert, options);
  std::vector<double> density;
  for (const SliceBulk& s : bulk.slices) density.push_back(s.psi_integral - cert.epsilon * s.k_integral);

  const CertificateSlice& first = cert.slices.front();
  std::vector<VectorField> a0;
  for (const DriftedVectorField& a : first.a) a0.push_back(a.full());

  DualValue out;
  out.bt = boundary_term_ivp(cert.labels, first.theta, a0, c0, q0);
  out.bulk = trapezoid(density, cert.dt);
  out.total = out.bt + out.bulk;
  out.diagnostics = bulk.diagnostics;
  return out;
}

DualValue dual_objective(const DualCertificate& cert, const MepsState& initial, const DualOptions& options) {
  std::vector<ScalarField> c0;
  std::vector<VectorField> q0;
  for (std::size_t a = 0; a < initial.streams.size(); ++a) {
    c0.push_back(initial.streams[a].concentration);
    q0.push_back(momentum(initial, a));
  }
  return dual_objective(cert, c0, q0, options);
}

DualCertificate certificate_from_solution(const Trajectory& trajectory) {
  check_time_grid(trajectory);
  const HypothesisReport hyp = check_hypotheses(trajectory);
  if (!hyp.ok()) {
    std::ostringstream msg;
    if (!hyp.spectral_ok()) {
      msg << "strain bound fails at t = " << hyp.worst_spectral_time << " (margin " << hyp.spectral_margin << ")";
    }
    if (!hyp.absorbing) {
      if (!hyp.spectral_ok()) msg << "; ";
      msg << "velocities not weakly absorbing at t = " << hyp.worst_absorbing_time << " (inclusion radius "
          << hyp.absorbing_margin << ")";
    }
    throw MepsError(ErrorKind::kHypothesisFailed, msg.str());
  }

  const MepsState& init = trajectory.initial();
  const double horizon = trajectory.horizon;
  DualCertificate cert{init.grid, init.labels, horizon, init.epsilon, trajectory.dt, {}};
  cert.slices.resize(trajectory.states.size(), CertificateSlice{0.0, {}, {}, ScalarField(init.grid), {}, {}});

  parallel_for(trajectory.states.size(), [&](std::size_t k) {
    const MepsState& s = trajectory.states[k];
    const std::vector<StreamRate> rates = rhs(s, trajectory.dealiased);
    ScalarField source(s.grid);
    for (std::size_t a = 0; a < rates.size(); ++a) source += s.labels.weight(a) * rates[a].concentration;
    source += -source.mean();
    const ScalarField psi_rate = poisson_solve(source, s.epsilon);
    const double tau = s.time - horizon;

    CertificateSlice& slice = cert.slices[k];
    slice.time = s.time;
    slice.theta_rate.emplace();
    slice.a_rate.emplace();
    for (std::size_t a = 0; a < s.streams.size(); ++a) {
      const VectorField v = velocity(s, a);
      const VectorField v_rate = grad(rates[a].potential);
      const ScalarField half_speed2 = 0.5 * norm_squared(v);

      ScalarField theta = s.psi - half_speed2;
      ScalarField theta_rate = theta;
      theta *= tau;
      theta_rate += tau * (psi_rate - dot(v, v_rate));

      const Vec2 drift = s.streams[a].drift;
      DriftedVectorField big_a{tau * grad(s.streams[a].potential), {tau * drift[0], tau * drift[1]}};
      VectorField a_rate_field = v + tau * v_rate;

      slice.theta.push_back(std::move(theta));
      slice.a.push_back(std::move(big_a));
      slice.theta_rate->push_back(std::move(theta_rate));
      slice.a_rate->push_back(std::move(a_rate_field));
    }
    slice.psi = -1.0 * s.psi;
    slice.psi += (-tau) * psi_rate;
  });
  return cert;
}

DualCertificate zero_certificate(const Trajectory& trajectory) {
  check_time_grid(trajectory);
  const MepsState& init = trajectory.initial();
  const std::size_t m = init.labels.size();
  DualCertificate cert{init.grid, init.labels, trajectory.horizon, init.epsilon, trajectory.dt, {}};
  for (const MepsState& s : trajectory.states) {
    CertificateSlice slice{s.time, std::vector<ScalarField>(m, ScalarField(init.grid)),
                           std::vector<DriftedVectorField>(m, DriftedVectorField{VectorField(init.grid), {0.0, 0.0}}),
                           ScalarField(init.grid), std::vector<ScalarField>(m, ScalarField(init.grid)),
                           std::vector<VectorField>(m, VectorField(init.grid))};
    cert.slices.push_back(std::move(slice));
  }
  return cert;
}

IdentityValue inner_value_identity_440(const Trajectory& trajectory) {
  const DualCertificate cert = certificate_from_solution(trajectory);
  const BulkResult bulk = evaluate_bulk(cert, {DualDomain::kPointwiseFeasible});
  std::vector<double> density;
  for (const SliceBulk& s : bulk.slices) density.push_back(-cert.epsilon * s.k_integral);
  return {simpson(density, cert.dt), identity_440_rhs(trajectory)};
}

double identity_440_rhs(const Trajectory& trajectory) {
  const double eps = trajectory.initial().epsilon;
  std::vector<double> density;
  for (const MepsState& s : trajectory.states) density.push_back(grad_psi_squared(s));
  return eps * simpson(density, trajectory.dt) + trajectory.horizon * eps * grad_psi_squared(trajectory.initial()) / 2.0;
}

double lower_bound_441(const Trajectory& trajectory) {
  check_time_grid(trajectory);
  const MepsState& init = trajectory.initial();
  const double eps = init.epsilon;
  std::vector<double> density;
  for (const MepsState& s : trajectory.states) density.push_back(grad_psi_squared(s));
  return trajectory.horizon * kinetic_energy(init) + eps * trapezoid(density, trajectory.dt) -
         trajectory.horizon * eps * grad_psi_squared(init) / 2.0;
}

}  // namespace meps
