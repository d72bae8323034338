#pragma once

// Random dual-feasible certificates on a trajectory's time grid, with analytic
// time derivatives. The slack eta >= 0 is enforced by shifting theta_a by
// beta_a (T - t), which raises eta_a by beta_a everywhere.

#include <algorithm>
#include <vector>

#include "meps/dual.hpp"
#include "oracles.hpp"

namespace meps::oracle {

inline VectorField sample_vector(const TorusGrid& g, const std::vector<BandLimited>& comps) {
  std::vector<ScalarField> out;
  for (int a = 0; a < g.dim(); ++a) out.push_back(comps[a].sample(g));
  return VectorField(g, std::move(out));
}

inline DualCertificate random_feasible_certificate(const Trajectory& traj, Rng& rng) {
  const MepsState& init = traj.initial();
  const TorusGrid& g = init.grid;
  const int d = g.dim();
  const std::size_t m = init.labels.size();
  const double T = traj.horizon;

  struct LabelParts {
    ScalarField p, q;
    VectorField periodic;
    Vec2 drift;
  };
  std::vector<LabelParts> parts;
  for (std::size_t a = 0; a < m; ++a) {
    std::vector<BandLimited> comps;
    for (int k = 0; k < d; ++k) comps.push_back(random_band_limited(rng, d, 2, 1.0));
    VectorField periodic = sample_vector(g, comps);
    // A = (t - T) periodic, so both eigenvalue signs matter: keep T |lambda| below 1.
    const SymTensorField sg = sym_grad(periodic);
    const double lam =
        std::max({1e-12, max_eigenvalue_field(sg).max_abs(), min_eigenvalue_field(sg).max_abs()});
    periodic *= uniform(rng, 0.0, 0.8) / (T * lam);
    Vec2 drift{uniform(rng, -2, 2), d == 2 ? uniform(rng, -2, 2) : 0.0};
    parts.push_back({random_band_limited(rng, d, 2, 0.2).sample(g), random_band_limited(rng, d, 2, 0.2).sample(g),
                     std::move(periodic), drift});
  }
  const ScalarField h0 = random_band_limited(rng, d, 2, 0.3).sample(g);
  const ScalarField h1 = random_band_limited(rng, d, 2, 0.3).sample(g);
  const double k0 = uniform(rng, -0.3, 0.3);
  const double k1 = uniform(rng, -0.3, 0.3);

  DualCertificate cert{g, init.labels, T, init.epsilon, traj.dt, {}};
  for (const MepsState& s : traj.states) {
    const double t = s.time;
    const double tau = t - T;
    CertificateSlice slice{t, {}, {}, h0 + t * h1, std::vector<ScalarField>{}, std::vector<VectorField>{}};
    slice.psi += k0 + k1 * t;
    for (const LabelParts& lp : parts) {
      slice.theta.push_back(tau * (lp.p + t * lp.q));
      slice.theta_rate->push_back(lp.p + (2.0 * t - T) * lp.q);
      slice.a.push_back({tau * lp.periodic, {tau * lp.drift[0], tau * lp.drift[1]}});
      VectorField rate = lp.periodic;
      rate += lp.drift;
      slice.a_rate->push_back(std::move(rate));
    }
    cert.slices.push_back(std::move(slice));
  }

  for (std::size_t a = 0; a < m; ++a) {
    double lowest = 0.0;
    for (std::size_t k = 0; k < cert.slices.size(); ++k) lowest = std::min(lowest, compute_eta(cert, k, a).min());
    const double beta = -lowest + uniform(rng, 0.0, 1e-2);
    for (CertificateSlice& slice : cert.slices) {
      slice.theta[a] += beta * (T - slice.time);
      (*slice.theta_rate)[a] += -beta;
    }
  }
  return cert;
}

}  // namespace meps::oracle
