#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "meps/dual.hpp"
#include "meps/forward.hpp"
#include "meps/pointwise_qp.hpp"
#include "meps/torus_field.hpp"

using namespace meps;

namespace {

ScalarField smooth_field(const TorusGrid& g) {
  constexpr double k = 2.0 * std::numbers::pi;
  return ScalarField::from_function(g, [](Vec2 x) { return std::sin(k * x[0]) + 0.3 * std::cos(2 * k * (x[0] + x[1])); });
}

void BM_Grad(benchmark::State& state) {
  const TorusGrid g(int(state.range(0)), int(state.range(1)));
  const ScalarField f = smooth_field(g);
  for (auto _ : state) benchmark::DoNotOptimize(grad(f));
  state.SetItemsProcessed(state.iterations() * std::int64_t(g.size()));
}
BENCHMARK(BM_Grad)->Args({1, 256})->Args({1, 4096})->Args({2, 64})->Args({2, 256});

void BM_PoissonSolve(benchmark::State& state) {
  const TorusGrid g(int(state.range(0)), int(state.range(1)));
  ScalarField f = smooth_field(g);
  f += -f.mean();
  for (auto _ : state) benchmark::DoNotOptimize(poisson_solve(f, 1.0));
  state.SetItemsProcessed(state.iterations() * std::int64_t(g.size()));
}
BENCHMARK(BM_PoissonSolve)->Args({1, 256})->Args({1, 4096})->Args({2, 64})->Args({2, 256});

void BM_PointwiseQp(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> box(-2.0, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<QpInstance> instances(256);
  for (QpInstance& q : instances) {
    q.dim = 2;
    q.b = {box(rng), box(rng)};
    for (int j = 0; j < state.range(0); ++j) q.constraints.push_back({{box(rng), box(rng)}, unit(rng)});
  }
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(solve_pointwise_qp(instances[i++ % instances.size()]));
}
BENCHMARK(BM_PointwiseQp)->Arg(1)->Arg(3)->Arg(6);

void BM_ForwardPerturbed(benchmark::State& state) {
  const Scenario sc = scenario_perturbed(1.0, 0.05, 0.125, int(state.range(0)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(integrate_forward(sc));
}
BENCHMARK(BM_ForwardPerturbed)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_ForwardTristream(benchmark::State& state) {
  const Scenario sc = scenario_tristream(1.0, 0.0625, int(state.range(0)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(integrate_forward(sc));
}
BENCHMARK(BM_ForwardTristream)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_DualObjective(benchmark::State& state) {
  const Trajectory traj = integrate_forward(scenario_perturbed(1.0, 0.05, 0.125, int(state.range(0)), 1.0));
  const DualCertificate cert = certificate_from_solution(traj);
  for (auto _ : state) {
    benchmark::DoNotOptimize(dual_objective(cert, traj.initial(), {DualDomain::kPointwiseFeasible}));
  }
}
BENCHMARK(BM_DualObjective)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
