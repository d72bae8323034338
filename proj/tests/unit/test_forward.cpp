#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "meps/errors.hpp"
#include "meps/forward.hpp"
#include "meps/gap.hpp"
#include "oracles.hpp"

using namespace meps;
using oracle::kTwoPi;

namespace {

double state_distance(const MepsState& a, const MepsState& b) {
  double m = 0.0;
  for (std::size_t s = 0; s < a.streams.size(); ++s) {
    for (std::size_t p = 0; p < a.grid.size(); ++p) {
      m = std::max(m, std::abs(a.streams[s].concentration[p] - b.streams[s].concentration[p]));
      m = std::max(m, std::abs(a.streams[s].potential[p] - b.streams[s].potential[p]));
    }
  }
  for (std::size_t p = 0; p < a.grid.size(); ++p) m = std::max(m, std::abs(a.psi[p] - b.psi[p]));
  return m;
}

Trajectory manual_trajectory(std::vector<MepsState> states, double horizon) {
  Trajectory t;
  t.horizon = horizon;
  t.dt = horizon / double(states.size() - 1);
  t.states = std::move(states);
  return t;
}

}  // namespace

TEST_CASE("scenario constructors") {
  const Scenario cf = scenario_counterflow(1.0, 0.5, 32, 1.0);
  CHECK(validate(cf.initial).empty());
  CHECK(energy(cf.initial) == doctest::Approx(0.5));
  CHECK_THROWS_AS(scenario_counterflow(0.0, 0.5, 32, 1.0), MepsError);

  const Scenario p0 = scenario_perturbed(1.0, 0.0, 0.5, 32, 1.0);
  CHECK(state_distance(p0.initial, cf.initial) == 0.0);
  const Scenario p = scenario_perturbed(1.0, 0.1, 0.5, 32, 1.0);
  CHECK(std::abs(total_mass(p.initial) - 1.0) <= 1e-14);
  CHECK(p.initial.psi.max_abs() <= 1e-14);
  CHECK_THROWS_AS(scenario_perturbed(1.0, 0.5, 0.5, 32, 1.0), MepsError);
  CHECK_THROWS_AS(scenario_perturbed(1.0, -0.1, 0.5, 32, 1.0), MepsError);

  const Scenario tri = scenario_tristream(1.0, 0.25, 16, 1.0);
  CHECK(tri.initial.grid.dim() == 2);
  CHECK(validate(tri.initial).empty());
}

TEST_CASE("rhs") {
  SUBCASE("counterflow is steady") {
    const auto r = rhs(scenario_counterflow(1.0, 0.5, 32, 1.0).initial);
    for (const StreamRate& s : r) {
      CHECK(s.concentration.max_abs() <= 1e-14);
      CHECK(s.potential.max_abs() <= 1e-14);  // -u^2/2 is removed as gauge
    }
  }
  SUBCASE("uniform rest state") {
    const TorusGrid g(2, 8);
    std::vector<Stream> s{{ScalarField(g, 1.0), ScalarField(g), {}}};
    for (const StreamRate& r : rhs(make_state(0.0, g, LabelSet::uniform(1), 1.0, s))) {
      CHECK(r.concentration.max_abs() == 0.0);
      CHECK(r.potential.max_abs() == 0.0);
    }
  }
  SUBCASE("perturbed continuity rate") {
    const double u = 1.3;
    const MepsState st = scenario_perturbed(u, 0.1, 0.5, 64, 1.0).initial;
    const auto r = rhs(st);
    for (std::size_t p = 0; p < st.grid.size(); ++p) {
      const double x = st.grid.point(p)[0];
      CHECK(std::abs(r[0].concentration[p] + 0.1 * u * kTwoPi * std::cos(kTwoPi * x)) <= 1e-12);
    }
  }
  SUBCASE("gauge consistency") {
    MepsState st = scenario_perturbed(1.0, 0.1, 0.5, 32, 1.0).initial;
    const auto base = rhs(st);
    st.streams[1].potential += 4.2;
    const auto shifted = rhs(st);
    for (std::size_t a = 0; a < 2; ++a) {
      for (std::size_t p = 0; p < st.grid.size(); ++p) {
        CHECK(std::abs(base[a].concentration[p] - shifted[a].concentration[p]) <= 1e-14);
        CHECK(std::abs(base[a].potential[p] - shifted[a].potential[p]) <= 1e-14);
      }
    }
  }
  SUBCASE("invalid states are refused") {
    MepsState st = scenario_counterflow(1.0, 0.5, 32, 1.0).initial;
    st.streams[0].concentration[0] = -1.0;
    CHECK_THROWS_AS(rhs(st), MepsError);
  }
}

TEST_CASE("time step rule") {
  const Scenario sc = scenario_perturbed(1.0, 0.05, 0.125, 64, 1.0);
  const double dt = forward_step(sc, {});
  const double steps = sc.horizon / dt;
  CHECK(std::abs(steps - std::round(steps)) <= 1e-9);
  CHECK(dt <= 0.25 * (1.0 / 64) / (1.0 + 1.0) + 1e-15);
  CHECK(dt <= sc.horizon / 16 + 1e-15);
  ForwardOptions o;
  o.dt = 0.03;
  const double forced = forward_step(sc, o);
  CHECK(forced <= 0.03);
  CHECK(std::abs(sc.horizon / forced - std::round(sc.horizon / forced)) <= 1e-9);
}

TEST_CASE("counterflow is a fixed point") {
  const Trajectory t = integrate_forward(scenario_counterflow(1.0, 0.5, 32, 1.0));
  CHECK(t.states.back().time == 0.5);
  for (const MepsState& s : t.states) CHECK(state_distance(s, t.initial()) <= 1e-12);
}

TEST_CASE("conservation along the perturbed run") {
  const Trajectory t = integrate_forward(scenario_perturbed(1.0, 0.05, 0.125, 64, 1.0));
  check_time_grid(t);
  for (const MepsState& s : t.states) {
    CHECK(std::abs(total_mass(s) - 1.0) <= 1e-10);
    CHECK(std::abs(s.psi.mean()) <= 1e-12);
    CHECK(validate(s).empty());
  }
  CHECK(energy_drift(t) <= 1e-6);
}

TEST_CASE("halving dt shrinks the energy drift by 8x to 32x") {
  const Scenario sc = scenario_perturbed(1.0, 0.05, 0.125, 64, 1.0);
  ForwardOptions coarse;
  coarse.dt = sc.horizon / 16;
  ForwardOptions fine;
  fine.dt = sc.horizon / 32;
  const double ratio = energy_drift(integrate_forward(sc, coarse)) / energy_drift(integrate_forward(sc, fine));
  CHECK(ratio >= 8.0);
  CHECK(ratio <= 32.0);
}

TEST_CASE("RK4 self-convergence order") {
  const Scenario sc = scenario_perturbed(1.0, 0.05, 0.125, 64, 1.0);
  std::vector<MepsState> finals;
  for (int steps : {16, 32, 64}) {
    ForwardOptions o;
    o.dt = sc.horizon / steps;
    finals.push_back(integrate_forward(sc, o).final());
  }
  const double order = std::log2(state_distance(finals[0], finals[1]) / state_distance(finals[1], finals[2]));
  CHECK(order >= 3.5);
  CHECK(order <= 4.5);
}

TEST_CASE("numerical failure is reported") {
  const Scenario sc = scenario_perturbed(1.0, 0.3, 2.0, 64, 1.0);
  ForwardOptions o;
  o.dt = 1.0;
  try {
    integrate_forward(sc, o);
    FAIL("expected a numerical failure");
  } catch (const MepsError& e) {
    CHECK((e.kind() == ErrorKind::kBlowUp || e.kind() == ErrorKind::kNegativeConcentration));
  }
}

TEST_CASE("condition on the strain rate") {
  CHECK(check_condition_431(integrate_forward(scenario_counterflow(1.0, 0.5, 16, 1.0))).margin ==
        doctest::Approx(2.0));
  const SpectralCondition ss = check_condition_431(integrate_forward(scenario_single_stream(0.01, 0.0, 0.1, 64, 1.0)));
  CHECK(ss.margin == doctest::Approx(1.0 / 0.1 - 0.04 * std::numbers::pi).epsilon(1e-3));
  CHECK(ss.margin > 0.0);

  // d = 1: grad v + grad v^T = 2 theta'' = 3 cos(2 pi x) for this potential.
  const TorusGrid g(1, 32);
  auto theta = ScalarField::from_function(g, [](Vec2 x) { return -1.5 * std::cos(kTwoPi * x[0]) / (kTwoPi * kTwoPi); });
  std::vector<MepsState> states;
  for (double t : {0.0, 1.0}) {
    std::vector<Stream> s{{ScalarField(g, 1.0), theta, {}}};
    states.push_back(make_state(t, g, LabelSet::uniform(1), 1.0, s));
  }
  const SpectralCondition bad = check_condition_431(manual_trajectory(states, 1.0));
  CHECK(bad.margin == doctest::Approx(1.0 - 3.0));
}

TEST_CASE("weak absorption") {
  const AbsorbingCondition cf = check_weakly_absorbing(scenario_counterflow(1.0, 0.5, 16, 1.0).initial);
  CHECK(cf.absorbing);
  CHECK(cf.margin == doctest::Approx(1.0));
  CHECK_FALSE(check_weakly_absorbing(scenario_single_stream(0.0, 0.8, 0.5, 16, 1.0).initial).absorbing);
  const AbsorbingCondition tri = check_weakly_absorbing(scenario_tristream(1.0, 0.25, 8, 1.0).initial);
  CHECK(tri.absorbing);
  CHECK(tri.margin == doctest::Approx(0.5));

  const std::vector<Vec2> none{{0.0, 0.0}};
  CHECK(inclusion_radius(none, 2) == 0.0);
  const std::vector<Vec2> line{{1.0, 0.0}, {-1.0, 0.0}};
  CHECK(inclusion_radius(line, 2) <= 0.0);
  CHECK(inclusion_radius(line, 1) == doctest::Approx(1.0));
  const std::vector<Vec2> side{{0.5, 0.0}, {2.0, 0.0}};
  CHECK(inclusion_radius(side, 1) < 0.0);
}

TEST_CASE("hull test agrees with a direction scan") {
  oracle::Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Vec2> v(1 + trial % 6);
    for (Vec2& x : v) x = {oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1)};
    const double exact = inclusion_radius(v, 2);
    const double scan = oracle::direction_scan_margin(v);
    CHECK(scan >= exact - 1e-12);
    // 3600 directions: the minimum sits at a kink, so the scan error is O(|v| h_angle).
    CHECK(scan - exact <= 2e-3);
    if (std::abs(exact) > 2e-3) CHECK((exact > 0.0) == (scan > 0.0));
  }
}

TEST_CASE("hypothesis report") {
  const HypothesisReport r = check_hypotheses(integrate_forward(scenario_counterflow(2.0, 0.25, 16, 1.0)));
  CHECK(r.ok());
  CHECK(r.spectral_margin == doctest::Approx(4.0));
  CHECK(r.absorbing_margin == doctest::Approx(2.0));
}
