#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "meps/multistream_state.hpp"

namespace meps {

/// Vector test function made of a periodic part and a constant drift; only the
/// periodic part has a spatial gradient.
struct DriftedVectorField {
  VectorField periodic;
  Vec2 drift{0.0, 0.0};
  VectorField full() const;
};

struct CertificateSlice {
  double time = 0.0;
  std::vector<ScalarField> theta;       // per label
  std::vector<DriftedVectorField> a;    // per label
  ScalarField psi;
  /// Exact time derivatives when the certificate is built analytically; when
  /// absent they are taken by finite differences over the slices.
  std::optional<std::vector<ScalarField>> theta_rate;
  std::optional<std::vector<VectorField>> a_rate;
};

/// Test functions (theta, A, psi) sampled at t_k = k dt, k = 0..K, t_K = T.
struct DualCertificate {
  TorusGrid grid;
  LabelSet labels;
  double horizon = 0.0;
  double epsilon = 1.0;
  double dt = 0.0;
  std::vector<CertificateSlice> slices;
};

inline constexpr double kSingularTolerance = 1e-8;
inline constexpr double kSpectralTolerance = 1e-10;
inline constexpr double kEtaTolerance = 1e-8;
/// Largest uniform constraint shift accepted in the pointwise-feasible domain.
inline constexpr double kRelaxationTolerance = 1e-6;

/// eta = -( (I - S)^{-1} w . w / 2 + d theta/dt ) - psi, with S = grad A + grad A^T
/// and w = dA/dt + grad theta. Throws MepsError(kSingularMatrix) if
/// lambda_max(S) >= 1 - kSingularTolerance anywhere.
ScalarField compute_eta(const DualCertificate& cert, std::size_t slice, std::size_t label);

struct SpectralConstraint {
  bool ok;
  double margin;  // min over (t, x, a) of 1 - lambda_max(S)
};
SpectralConstraint check_spectral_constraint(const DualCertificate& cert);

enum class DualDomain {
  /// eta >= -kEtaTolerance everywhere (small negatives clamped to 0), so E = 0 is feasible.
  kNonnegativeSlack,
  /// Only the pointwise set {E : E . A_a <= eta_a} must be nonempty, up to kRelaxationTolerance.
  kPointwiseFeasible,
};

struct DualOptions {
  DualDomain domain = DualDomain::kNonnegativeSlack;
};

struct DualDiagnostics {
  double spectral_margin = 0.0;
  double min_eta = 0.0;
  double max_relaxation = 0.0;
  std::size_t relaxed_points = 0;
  std::vector<std::size_t> active_histogram;  // index = active-set size
};

struct DualValue {
  double bt = 0.0;
  double bulk = 0.0;  // int_Q psi - epsilon K(grad psi)
  double total = 0.0;
  DualDiagnostics diagnostics;
};

/// Boundary term plus trapezoid-in-time bulk term. At t = T, where A vanishes,
/// each constraint is replaced by its limit E . (-dA/dt) <= -d eta/dt when
/// |eta(T)| <= kEtaTolerance and dropped when eta(T) is positive.
/// Throws MepsError(kInfeasibleCertificate) outside the chosen domain.
DualValue dual_objective(const DualCertificate& cert, std::span<const ScalarField> c0,
                         std::span<const VectorField> q0, const DualOptions& options = {});
DualValue dual_objective(const DualCertificate& cert, const MepsState& initial, const DualOptions& options = {});

/// A = (t - T) v, theta = (t - T)(psi_s - |v|^2/2), psi = -psi_s + (T - t) d psi_s/dt,
/// with time derivatives taken from the evolution equations.
/// Throws MepsError(kHypothesisFailed) when either hypothesis fails.
DualCertificate certificate_from_solution(const Trajectory& trajectory);

/// theta = A = psi = 0 on the trajectory's time grid.
DualCertificate zero_certificate(const Trajectory& trajectory);

struct IdentityValue {
  double lhs;
  double rhs;
};
/// lhs: epsilon int_Q (E . grad psi + |E|^2/2) at the pointwise QP minimiser for the
/// explicit certificate; rhs: see identity_440_rhs. Both sides use Simpson weights in
/// time, since the two integrands differ by a time derivative.
IdentityValue inner_value_identity_440(const Trajectory& trajectory);
/// epsilon int_Q |grad psi_s|^2 + T epsilon int |grad psi_s(0)|^2 / 2, from the stored psi (Simpson in time).
double identity_440_rhs(const Trajectory& trajectory);

/// T int c0 |v(0)|^2/2 + epsilon int_Q |grad psi_s|^2 - T epsilon int |grad psi_s(0)|^2 / 2.
double lower_bound_441(const Trajectory& trajectory);

}  // namespace meps
