#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "meps/action.hpp"
#include "meps/dual.hpp"
#include "meps/forward.hpp"

namespace meps {

inline constexpr const char* kGapReportSchema = "meps-gap-report/1";
inline constexpr const char* kSweepSchema = "meps-sweep/1";
inline constexpr double kWeakDualityTolerance = 1e-8;

struct RunConfig {
  std::string scenario = "perturbed";
  int n = 64;
  double horizon = 0.125;
  double epsilon = 1.0;
  double u = 1.0;
  double delta = 0.05;
  std::optional<double> dt;
  std::string out_dir;  // empty: nothing is written
  bool emit_snapshots = false;
  std::size_t stride = 1;
  std::vector<int> sweep_n;

  /// n a power of two in [8, 512], T in (0, 4], epsilon in (0, 100].
  /// Throws MepsError(kInadmissibleConfig).
  void validate() const;
};

/// counterflow (u), perturbed (u, delta), single_stream (drift u, amplitude delta), tristream (speed u, d = 2).
std::vector<std::string> scenario_names();
Scenario build_scenario(const RunConfig& config);

struct GapReport {
  RunConfig config;
  PrimalValue primal;
  DualValue dual;
  double gap_abs = 0.0;  // primal - dual
  double gap_rel = 0.0;  // gap_abs / max(primal, 1e-12)
  double energy_drift = 0.0;
  HypothesisReport hypothesis;
  ResidualReport residuals;
  int n = 0;
  double dt = 0.0;
  std::size_t steps = 0;
  double wall_time = 0.0;

  bool weak_duality_holds() const { return gap_abs >= -kWeakDualityTolerance; }
};

/// max_k |H(t_k) - H(0)| / max(1, |H(0)|).
double energy_drift(const Trajectory& trajectory);

/// Scenario, forward run, hypotheses, primal action, explicit certificate and dual
/// (pointwise-feasible domain). Writes report.json and diagnostics.csv into
/// out_dir when it is set. Errors keep their kind and gain the scenario context.
GapReport run_gap_experiment(const RunConfig& config);

struct SweepResult {
  std::vector<GapReport> runs;
  /// Least-squares slope of -log|value| against log(n); absent with one
  /// resolution or when a value is zero.
  std::optional<double> gap_order;
  std::optional<double> energy_order;
};
SweepResult convergence_sweep(const RunConfig& config);

std::string diagnostics_csv(const Trajectory& trajectory);

std::string report_json(const GapReport& report);
std::string sweep_json(const SweepResult& sweep);
std::string primal_json(const PrimalValue& primal, const ResidualReport& residuals);
std::string dual_json(const DualValue& dual, const std::string& certificate);
std::string config_json(const RunConfig& config);

}  // namespace meps
