#include "meps/pointwise_qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "meps/errors.hpp"

namespace meps {
namespace {

// Constraint with unit normal: n . E <= beta.
struct Halfspace {
  Vec2 n;
  double beta;
};

double dotv(const Vec2& a, const Vec2& b, int d) { return d == 1 ? a[0] * b[0] : a[0] * b[0] + a[1] * b[1]; }

double length(const Vec2& a, int d) { return std::sqrt(dotv(a, a, d)); }

double violation(const std::vector<Halfspace>& hs, const Vec2& e, int d) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& h : hs) worst = std::max(worst, dotv(h.n, e, d) - h.beta);
  return worst;
}

struct Normalised {
  std::vector<Halfspace> halfspaces;
  double degenerate_shortfall = 0.0;  // from zero-normal constraints with negative bounds
};

Normalised normalise(const QpInstance& inst) {
  const int d = inst.dim;
  Normalised out;
  for (const auto& c : inst.constraints) {
    const double len = length(c.normal, d);
    if (len < 1e-14) {
      out.degenerate_shortfall = std::max(out.degenerate_shortfall, -c.bound);
      continue;
    }
    Halfspace h{{c.normal[0] / len, d == 2 ? c.normal[1] / len : 0.0}, c.bound / len};
    auto same = std::find_if(out.halfspaces.begin(), out.halfspaces.end(), [&](const Halfspace& o) {
      return std::abs(o.n[0] - h.n[0]) <= 1e-12 && std::abs(o.n[1] - h.n[1]) <= 1e-12;
    });
    if (same == out.halfspaces.end()) {
      out.halfspaces.push_back(h);
    } else {
      same->beta = std::min(same->beta, h.beta);
    }
  }
  return out;
}

struct Projection {
  Vec2 e;
  int active;
};

// Projection of z onto the polyhedron, or nullopt if no feasible candidate exists.
std::optional<Projection> project(const std::vector<Halfspace>& hs, const Vec2& z, int d) {
  const double tol = kQpFeasibilityTol;
  if (violation(hs, z, d) <= tol) return Projection{z, 0};

  std::optional<Projection> kkt;
  double kkt_dist = std::numeric_limits<double>::infinity();
  std::optional<Projection> fallback;
  double fallback_dist = std::numeric_limits<double>::infinity();
  auto offer = [&](const Vec2& e, int active, bool multipliers_ok) {
    if (violation(hs, e, d) > tol) return;
    const Vec2 diff{e[0] - z[0], e[1] - z[1]};
    const double dist = dotv(diff, diff, d);
    if (multipliers_ok && dist < kkt_dist) {
      kkt = Projection{e, active};
      kkt_dist = dist;
    }
    if (dist < fallback_dist) {
      fallback = Projection{e, active};
      fallback_dist = dist;
    }
  };

  const double mult_tol = 1e-12 * std::max(1.0, length(z, d));
  for (const auto& h : hs) {
    const double lambda = dotv(h.n, z, d) - h.beta;
    offer({z[0] - lambda * h.n[0], d == 2 ? z[1] - lambda * h.n[1] : 0.0}, 1, lambda >= -mult_tol);
  }
  if (d == 2) {
    for (std::size_t i = 0; i < hs.size(); ++i) {
      for (std::size_t j = i + 1; j < hs.size(); ++j) {
        const Vec2& a = hs[i].n;
        const Vec2& b = hs[j].n;
        const double det = a[0] * b[1] - a[1] * b[0];
        if (std::abs(det) < 1e-12) continue;
        const Vec2 e{(hs[i].beta * b[1] - a[1] * hs[j].beta) / det, (a[0] * hs[j].beta - hs[i].beta * b[0]) / det};
        // z - e = li a + lj b
        const Vec2 r{z[0] - e[0], z[1] - e[1]};
        const double li = (r[0] * b[1] - r[1] * b[0]) / det;
        const double lj = (a[0] * r[1] - a[1] * r[0]) / det;
        offer(e, 2, li >= -mult_tol && lj >= -mult_tol);
      }
    }
  }
  return kkt ? kkt : fallback;
}

// Smallest uniform shift s with {E : n_i . E <= beta_i + s} nonempty, found at
// the LP vertices (or at antiparallel pairs, whose optimal face may be a line).
double required_shift(const std::vector<Halfspace>& hs, const Vec2& z, int d) {
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](const Vec2& e) { best = std::min(best, violation(hs, e, d)); };
  for (std::size_t i = 0; i < hs.size(); ++i) {
    for (std::size_t j = i + 1; j < hs.size(); ++j) {
      const double cosine = dotv(hs[i].n, hs[j].n, d);
      if (cosine < -1.0 + 1e-12) {
        // Mid-plane of the slab n_i . E <= beta_i, -n_i . E <= beta_j; pick the point nearest z.
        const double level = 0.5 * (hs[i].beta - hs[j].beta);
        const double off = dotv(hs[i].n, z, d) - level;
        consider({z[0] - off * hs[i].n[0], d == 2 ? z[1] - off * hs[i].n[1] : 0.0});
      }
      if (d == 1) continue;
      for (std::size_t l = j + 1; l < hs.size(); ++l) {
        // Solve n . E - s = beta for the three constraints.
        const Halfspace* t[3] = {&hs[i], &hs[j], &hs[l]};
        double m[3][4];
        for (int r = 0; r < 3; ++r) {
          m[r][0] = t[r]->n[0];
          m[r][1] = t[r]->n[1];
          m[r][2] = -1.0;
          m[r][3] = t[r]->beta;
        }
        bool singular = false;
        for (int col = 0; col < 3 && !singular; ++col) {
          int pivot = col;
          for (int r = col + 1; r < 3; ++r) {
            if (std::abs(m[r][col]) > std::abs(m[pivot][col])) pivot = r;
          }
          if (std::abs(m[pivot][col]) < 1e-12) {
            singular = true;
            break;
          }
          std::swap(m[col], m[pivot]);
          for (int r = 0; r < 3; ++r) {
            if (r == col) continue;
            const double f = m[r][col] / m[col][col];
            for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
          }
        }
        if (!singular) consider({m[0][3] / m[0][0], m[1][3] / m[1][1]});
      }
    }
  }
  return std::max(0.0, best);
}

}  // namespace

double qp_violation(const QpInstance& instance, Vec2 e) {
  const Normalised norm = normalise(instance);
  const double v = violation(norm.halfspaces, e, instance.dim);
  return std::max(v, norm.degenerate_shortfall > 0.0 ? norm.degenerate_shortfall : v);
}

QpSolution solve_pointwise_qp(const QpInstance& instance) {
  const int d = instance.dim;
  if (d != 1 && d != 2) throw MepsError(ErrorKind::kInvalidArgument, "QP dimension must be 1 or 2");
  Normalised norm = normalise(instance);
  const Vec2 z{-instance.b[0], d == 2 ? -instance.b[1] : 0.0};

  QpSolution out;
  out.relaxation = norm.degenerate_shortfall;
  std::optional<Projection> proj = project(norm.halfspaces, z, d);
  if (!proj) {
    const double shift = required_shift(norm.halfspaces, z, d);
    for (auto& h : norm.halfspaces) h.beta += shift + 0.5 * kQpFeasibilityTol;
    out.relaxation = std::max(out.relaxation, shift);
    proj = project(norm.halfspaces, z, d);
    if (!proj) throw MepsError(ErrorKind::kInfeasibleCertificate, "pointwise constraint set could not be repaired");
  }
  out.e = proj->e;
  out.active = proj->active;
  out.k_value = -(0.5 * dotv(out.e, out.e, d) + dotv(out.e, instance.b, d));
  return out;
}

}  // namespace meps
