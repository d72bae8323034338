#include "meps/gap.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>

#include <json.hpp>

#include "meps/errors.hpp"
#include "meps/state_io.hpp"
#include "meps/snapshot.hpp"

namespace meps {
namespace {

using nlohmann::json;
using Builder = std::function<Scenario(const RunConfig&)>;

const std::map<std::string, Builder>& registry() {
  static const std::map<std::string, Builder> builders = {
      {"counterflow", [](const RunConfig& c) { return scenario_counterflow(c.u, c.horizon, c.n, c.epsilon); }},
      {"perturbed", [](const RunConfig& c) { return scenario_perturbed(c.u, c.delta, c.horizon, c.n, c.epsilon); }},
      {"single_stream",
       [](const RunConfig& c) { return scenario_single_stream(c.delta, c.u, c.horizon, c.n, c.epsilon); }},
      {"tristream", [](const RunConfig& c) { return scenario_tristream(c.u, c.horizon, c.n, c.epsilon); }},
  };
  return builders;
}

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void admissible(bool ok, const std::string& what) {
  if (!ok) throw MepsError(ErrorKind::kInadmissibleConfig, what);
}

std::string context(const RunConfig& c) {
  std::ostringstream out;
  out << "scenario " << c.scenario << " (n=" << c.n << ", T=" << c.horizon << ", epsilon=" << c.epsilon
      << ", u=" << c.u << ", delta=" << c.delta << "): ";
  return out.str();
}

json to_json(const RunConfig& c) {
  json j = {{"scenario", c.scenario}, {"n", c.n},         {"T", c.horizon},
            {"epsilon", c.epsilon},   {"u", c.u},         {"delta", c.delta},
            {"dt", c.dt ? json(*c.dt) : json(nullptr)}};
  return j;
}

json to_json(const PrimalValue& p) {
  return {{"kinetic_part", p.kinetic_part}, {"field_part", p.field_part}, {"total", p.total}};
}

json to_json(const ResidualReport& r) {
  return {{"battery_version", kResidualBatteryVersion},
          {"continuity", r.continuity},
          {"gauss", r.gauss},
          {"momentum", r.momentum}};
}

json to_json(const DualValue& d) {
  return {{"bt", d.bt},
          {"bulk", d.bulk},
          {"total", d.total},
          {"spectral_margin", d.diagnostics.spectral_margin},
          {"min_eta", d.diagnostics.min_eta},
          {"max_relaxation", d.diagnostics.max_relaxation},
          {"relaxed_points", d.diagnostics.relaxed_points},
          {"active_set_histogram", d.diagnostics.active_histogram}};
}

json to_json(const HypothesisReport& h) {
  return {{"spectral_margin", h.spectral_margin},
          {"spectral_ok", h.spectral_ok()},
          {"absorbing", h.absorbing},
          {"absorbing_margin", h.absorbing_margin},
          {"worst_spectral_time", h.worst_spectral_time},
          {"worst_absorbing_time", h.worst_absorbing_time}};
}

json to_json(const GapReport& r) {
  return {{"schema", kGapReportSchema},
          {"config", to_json(r.config)},
          {"resolution", {{"n", r.n}, {"dt", r.dt}, {"steps", r.steps}}},
          {"primal", to_json(r.primal)},
          {"dual", to_json(r.dual)},
          {"gap_abs", r.gap_abs},
          {"gap_rel", r.gap_rel},
          {"weak_duality_holds", r.weak_duality_holds()},
          {"energy_drift", r.energy_drift},
          {"hypothesis", to_json(r.hypothesis)},
          {"residuals", to_json(r.residuals)},
          {"wall_time", r.wall_time}};
}

std::optional<double> fitted_order(const std::vector<GapReport>& runs, double GapReport::*field) {
  if (runs.size() < 2) return std::nullopt;
  std::vector<double> x;
  std::vector<double> y;
  for (const GapReport& r : runs) {
    const double v = std::abs(r.*field);
    if (!(v > 0.0)) return std::nullopt;
    x.push_back(std::log(double(r.n)));
    y.push_back(-std::log(v));
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= double(x.size());
  my /= double(y.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

}  // namespace

void RunConfig::validate() const {
  admissible(registry().count(scenario) == 1, "unknown scenario '" + scenario + "'");
  auto check_n = [](int value) {
    admissible(power_of_two(value) && value >= 8 && value <= 512,
               "n = " + std::to_string(value) + " must be a power of two in [8, 512]");
  };
  check_n(n);
  for (int value : sweep_n) check_n(value);
  admissible(std::isfinite(horizon) && horizon > 0.0 && horizon <= 4.0, "T must lie in (0, 4]");
  admissible(std::isfinite(epsilon) && epsilon > 0.0 && epsilon <= 100.0, "epsilon must lie in (0, 100]");
  admissible(std::isfinite(u), "u must be finite");
  admissible(std::isfinite(delta), "delta must be finite");
  if (dt) admissible(std::isfinite(*dt) && *dt > 0.0 && *dt <= horizon, "dt must lie in (0, T]");
  admissible(stride >= 1, "snapshot stride must be at least 1");
}

std::vector<std::string> scenario_names() {
  std::vector<std::string> out;
  for (const auto& [name, builder] : registry()) out.push_back(name);
  return out;
}

Scenario build_scenario(const RunConfig& config) {
  config.validate();
  try {
    return registry().at(config.scenario)(config);
  } catch (const MepsError& e) {
    throw MepsError(ErrorKind::kInadmissibleConfig, context(config) + e.detail());
  }
}

double energy_drift(const Trajectory& trajectory) {
  const double h0 = energy(trajectory.initial());
  double worst = 0.0;
  for (const MepsState& s : trajectory.states) worst = std::max(worst, std::abs(energy(s) - h0));
  return worst / std::max(1.0, std::abs(h0));
}

GapReport run_gap_experiment(const RunConfig& config) {
  const Scenario scenario = build_scenario(config);
  const auto start = std::chrono::steady_clock::now();
  GapReport report;
  report.config = config;
  try {
    ForwardOptions options;
    options.dt = config.dt;
    const Trajectory traj = integrate_forward(scenario, options);
    report.n = config.n;
    report.dt = traj.dt;
    report.steps = traj.intervals();
    report.energy_drift = energy_drift(traj);
    report.hypothesis = check_hypotheses(traj);
    report.primal = primal_action(traj);
    report.residuals = weak_residuals(traj);
    const DualCertificate cert = certificate_from_solution(traj);
    report.dual = dual_objective(cert, traj.initial(), {DualDomain::kPointwiseFeasible});
    report.gap_abs = report.primal.total - report.dual.total;
    report.gap_rel = report.gap_abs / std::max(report.primal.total, 1e-12);
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (!config.out_dir.empty()) {
      const std::filesystem::path dir(config.out_dir);
      std::filesystem::create_directories(dir);
      write_text_atomic(dir / "diagnostics.csv", diagnostics_csv(traj));
      if (config.emit_snapshots) write_trajectory(traj, dir / "trajectory", config.stride);
      write_text_atomic(dir / "report.json", report_json(report));
    }
  } catch (const MepsError& e) {
    throw MepsError(e.kind(), context(config) + e.detail());
  }
  return report;
}

SweepResult convergence_sweep(const RunConfig& config) {
  config.validate();
  SweepResult out;
  const std::vector<int> ns = config.sweep_n.empty() ? std::vector<int>{config.n} : config.sweep_n;
  for (int n : ns) {
    RunConfig run = config;
    run.n = n;
    run.sweep_n.clear();
    if (!config.out_dir.empty()) run.out_dir = (std::filesystem::path(config.out_dir) / ("n" + std::to_string(n))).string();
    out.runs.push_back(run_gap_experiment(run));
  }
  out.gap_order = fitted_order(out.runs, &GapReport::gap_rel);
  out.energy_order = fitted_order(out.runs, &GapReport::energy_drift);
  if (!config.out_dir.empty()) write_text_atomic(std::filesystem::path(config.out_dir) / "sweep.json", sweep_json(out));
  return out;
}

std::string diagnostics_csv(const Trajectory& trajectory) {
  std::string out = "t,mass,energy,min_c,gauss_residual\n";
  char line[160];
  for (const MepsState& s : trajectory.states) {
    double min_c = s.streams.front().concentration.min();
    for (const Stream& st : s.streams) min_c = std::min(min_c, st.concentration.min());
    std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g,%.17g\n", s.time, total_mass(s), energy(s), min_c,
                  gauss_residual(s));
    out += line;
  }
  return out;
}

std::string report_json(const GapReport& report) { return to_json(report).dump(2) + "\n"; }

std::string sweep_json(const SweepResult& sweep) {
  json runs = json::array();
  for (const GapReport& r : sweep.runs) runs.push_back(to_json(r));
  json summary = {{"resolutions", sweep.runs.size()}};
  if (sweep.gap_order) summary["gap_rel_order"] = *sweep.gap_order;
  if (sweep.energy_order) summary["energy_drift_order"] = *sweep.energy_order;
  json gaps = json::array();
  for (const GapReport& r : sweep.runs) gaps.push_back({{"n", r.n}, {"gap_rel", r.gap_rel}, {"energy_drift", r.energy_drift}});
  summary["table"] = gaps;
  return json{{"schema", kSweepSchema}, {"runs", runs}, {"summary", summary}}.dump(2) + "\n";
}

std::string primal_json(const PrimalValue& primal, const ResidualReport& residuals) {
  return json{{"primal", to_json(primal)}, {"residuals", to_json(residuals)}}.dump(2) + "\n";
}

std::string dual_json(const DualValue& dual, const std::string& certificate) {
  json j = to_json(dual);
  j["certificate"] = certificate;
  return j.dump(2) + "\n";
}

std::string config_json(const RunConfig& config) { return to_json(config).dump(2) + "\n"; }

}  // namespace meps
