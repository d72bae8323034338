#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>

#include <CLI11.hpp>
#include <json.hpp>

#include "meps/dual.hpp"
#include "meps/gap.hpp"
#include "meps/snapshot.hpp"
#include "meps/state_io.hpp"

namespace meps::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Settings {
  RunConfig run;
  double dt = 0.0;
  std::string traj;
  std::string certificate = "explicit";
  std::string domain = "auto";
  std::string state;
  std::string out;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat JSON object whose keys are long flag names; applied before the command line.
void apply_config(const fs::path& path, Settings& s) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError(path.string() + ": expected a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "scenario") s.run.scenario = value.get<std::string>();
      else if (key == "n") s.run.n = value.get<int>();
      else if (key == "T") s.run.horizon = value.get<double>();
      else if (key == "epsilon") s.run.epsilon = value.get<double>();
      else if (key == "u") s.run.u = value.get<double>();
      else if (key == "delta") s.run.delta = value.get<double>();
      else if (key == "dt") s.run.dt = value.get<double>();
      else if (key == "stride") s.run.stride = value.get<std::size_t>();
      else if (key == "snapshots") s.run.emit_snapshots = value.get<bool>();
      else if (key == "ns") s.run.sweep_n = value.get<std::vector<int>>();
      else if (key == "traj") s.traj = value.get<std::string>();
      else if (key == "certificate") s.certificate = value.get<std::string>();
      else if (key == "domain") s.domain = value.get<std::string>();
      else if (key == "state") s.state = value.get<std::string>();
      else if (key == "out") s.out = value.get<std::string>();
      else throw UsageError(path.string() + ": unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
}

std::string find_config(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config needs a file argument");
      return args[i + 1];
    }
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return {};
}

void add_run_flags(CLI::App* sub, Settings& s) {
  sub->add_option("--scenario", s.run.scenario, "counterflow | perturbed | single_stream | tristream")
      ->capture_default_str();
  sub->add_option("--n", s.run.n, "grid points per axis (power of two in [8, 512])")->capture_default_str();
  sub->add_option("--T", s.run.horizon, "time horizon in (0, 4]")->capture_default_str();
  sub->add_option("--epsilon", s.run.epsilon, "Poisson coupling in (0, 100]")->capture_default_str();
  sub->add_option("--u", s.run.u, "stream speed (drift for single_stream)")->capture_default_str();
  sub->add_option("--delta", s.run.delta, "perturbation amplitude")->capture_default_str();
  sub->add_option("--dt", s.dt, "time step override (rounded so that T/dt is an integer)");
}

DualDomain pick_domain(const Settings& s) {
  if (s.domain == "slack") return DualDomain::kNonnegativeSlack;
  if (s.domain == "pointwise") return DualDomain::kPointwiseFeasible;
  return s.certificate == "explicit" ? DualDomain::kPointwiseFeasible : DualDomain::kNonnegativeSlack;
}

int cmd_forward(const Settings& s, std::ostream& out) {
  RunConfig cfg = s.run;
  cfg.validate();
  const Scenario scenario = build_scenario(cfg);
  ForwardOptions options;
  options.dt = cfg.dt;
  const Trajectory traj = integrate_forward(scenario, options);
  const fs::path dir(s.out);
  fs::create_directories(dir);
  write_text_atomic(dir / "diagnostics.csv", diagnostics_csv(traj));
  write_trajectory(traj, dir, cfg.stride);
  double mass_drift = 0.0;
  for (const MepsState& st : traj.states) mass_drift = std::max(mass_drift, std::abs(total_mass(st) - 1.0));
  const json summary = {{"config", json::parse(config_json(cfg))},
                        {"out", dir.string()},
                        {"steps", traj.intervals()},
                        {"dt", traj.dt},
                        {"energy_drift", energy_drift(traj)},
                        {"mass_drift", mass_drift}};
  out << summary.dump(2) << "\n";
  return kExitOk;
}

int cmd_action(const Settings& s, std::ostream& out) {
  const Trajectory traj = read_trajectory(s.traj);
  out << primal_json(primal_action(traj), weak_residuals(traj));
  return kExitOk;
}

int cmd_dual(const Settings& s, std::ostream& out) {
  const Trajectory traj = read_trajectory(s.traj);
  const DualCertificate cert = s.certificate == "zero" ? zero_certificate(traj) : certificate_from_solution(traj);
  const std::string report = dual_json(dual_objective(cert, traj.initial(), {pick_domain(s)}), s.certificate);
  if (!s.out.empty()) write_text_atomic(s.out, report);
  out << report;
  return kExitOk;
}

int cmd_gap(const Settings& s, std::ostream& out) {
  RunConfig cfg = s.run;
  cfg.out_dir = s.out;
  out << report_json(run_gap_experiment(cfg));
  return kExitOk;
}

int cmd_sweep(const Settings& s, std::ostream& out) {
  RunConfig cfg = s.run;
  cfg.out_dir = s.out;
  out << sweep_json(convergence_sweep(cfg));
  return kExitOk;
}

int cmd_check(const Settings& s, std::ostream& out) {
  fs::path meps_file(s.state);
  if (meps_file.extension() != ".meps") meps_file.replace_extension(".meps");
  const RoundTripReport rt = check_round_trip(meps_file);
  const MepsState state = read_state(meps_file);
  const std::vector<Violation> violations = validate(state);
  json list = json::array();
  for (const Violation& v : violations) {
    json item = {{"invariant", v.invariant}, {"worst_value", v.worst_value}, {"point", v.point}};
    if (v.label) item["label"] = state.labels.id(*v.label);
    list.push_back(item);
  }
  const json report = {{"file", meps_file.string()}, {"bytes", rt.bytes},  {"blocks", rt.blocks},
                       {"bit_exact", rt.bit_exact},  {"valid", violations.empty()}, {"violations", list}};
  out << report.dump(2) << "\n";
  if (!rt.bit_exact) return kExitUsage;
  return violations.empty() ? kExitOk : kExitInfeasible;
}

}  // namespace

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kFormat:
      return kExitUsage;
    case ErrorKind::kBlowUp:
    case ErrorKind::kNegativeConcentration:
    case ErrorKind::kNonZeroMeanSource:
      return kExitNumerical;
    default:
      return kExitInfeasible;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Primal/dual duality-gap suite for the multi-stream Euler-Poisson system", "meps"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "JSON object of flag values; explicit flags take precedence");
  app.footer("Exit codes: 0 success, 1 usage error, 2 hypothesis or feasibility failure, 3 numerical blow-up.\n"
             "MEPS_THREADS caps internal parallelism.");

  CLI::App* forward = app.add_subcommand("forward", "integrate a scenario and dump diagnostics.csv and MEPS1 states");
  add_run_flags(forward, s);
  forward->add_option("--out", s.out, "output directory")->required();
  forward->add_option("--stride", s.run.stride, "store every k-th state (must divide the step count)")
      ->capture_default_str();

  CLI::App* action = app.add_subcommand("action", "primal action and weak residuals of a stored trajectory");
  action->add_option("--traj", s.traj, "trajectory directory written by `forward`")->required();

  CLI::App* dual = app.add_subcommand("dual", "dual objective of a certificate for a stored trajectory");
  dual->add_option("--traj", s.traj, "trajectory directory written by `forward`")->required();
  dual->add_option("--certificate", s.certificate, "explicit | zero")
      ->check(CLI::IsMember({"explicit", "zero"}))
      ->capture_default_str();
  dual->add_option("--domain", s.domain,
                   "feasibility domain: slack (eta >= 0), pointwise (nonempty QP set) or auto "
                   "(pointwise for explicit, slack for zero)")
      ->check(CLI::IsMember({"auto", "slack", "pointwise"}))
      ->capture_default_str();
  dual->add_option("--out", s.out, "also write the report to this file");

  CLI::App* gap = app.add_subcommand("gap", "end-to-end duality-gap experiment; report JSON on stdout");
  add_run_flags(gap, s);
  gap->add_option("--out", s.out, "directory for report.json and diagnostics.csv");
  gap->add_flag("--snapshots", s.run.emit_snapshots, "also dump the trajectory under <out>/trajectory");
  gap->add_option("--stride", s.run.stride, "snapshot stride")->capture_default_str();

  CLI::App* sweep = app.add_subcommand("sweep", "gap experiments over several resolutions with fitted orders");
  add_run_flags(sweep, s);
  sweep->add_option("--ns", s.run.sweep_n, "resolutions, e.g. --ns 32 64 128")->expected(1, -1);
  sweep->add_option("--out", s.out, "directory for per-resolution reports and sweep.json");

  CLI::App* check = app.add_subcommand("check", "validate a MEPS1 state dump and verify its bit-exact round trip");
  check->add_option("--state", s.state, "path to <stem>.meps (sidecar <stem>.json alongside)")->required();

  try {
    const std::string config = find_config(args);
    if (!config.empty()) apply_config(config, s);
    s.dt = s.run.dt.value_or(0.0);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    err << "meps: " << e.what() << "\n";
    return kExitUsage;
  }

  for (CLI::App* sub : {forward, gap, sweep}) {
    if (sub->parsed() && sub->count("--dt") > 0) s.run.dt = s.dt;
  }
  if (sweep->parsed() && s.run.sweep_n.empty()) {
    err << "meps: sweep needs --ns (or \"ns\" in --config)\n";
    return kExitUsage;
  }

  try {
    if (forward->parsed()) return cmd_forward(s, out);
    if (action->parsed()) return cmd_action(s, out);
    if (dual->parsed()) return cmd_dual(s, out);
    if (gap->parsed()) return cmd_gap(s, out);
    if (sweep->parsed()) return cmd_sweep(s, out);
    return cmd_check(s, out);
  } catch (const MepsError& e) {
    err << "meps: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "meps: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace meps::cli
