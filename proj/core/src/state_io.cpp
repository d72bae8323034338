#include "meps/state_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "meps/errors.hpp"
#include "meps/snapshot.hpp"

namespace meps {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path strip(const fs::path& path) {
  const std::string ext = path.extension().string();
  if (ext == ".meps" || ext == ".json") return fs::path(path).replace_extension();
  return path;
}

fs::path with_suffix(const fs::path& stem, const char* suffix) { return fs::path(stem.string() + suffix); }

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw MepsError(ErrorKind::kFormat, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw MepsError(ErrorKind::kFormat, path.string() + ": " + e.what());
  }
}

std::string state_file_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "state_%05zu", index);
  return buf;
}

}  // namespace

void write_state(const MepsState& state, const fs::path& stem_in) {
  const fs::path stem = strip(stem_in);
  std::vector<const ScalarField*> fields;
  json layout = json::array();
  json drifts = json::array();
  for (std::size_t a = 0; a < state.streams.size(); ++a) {
    fields.push_back(&state.streams[a].concentration);
    fields.push_back(&state.streams[a].potential);
    layout.push_back("c:" + state.labels.id(a));
    layout.push_back("theta:" + state.labels.id(a));
    const Vec2& d = state.streams[a].drift;
    drifts.push_back(state.grid.dim() == 1 ? json::array({d[0]}) : json::array({d[0], d[1]}));
  }
  fields.push_back(&state.psi);
  layout.push_back("psi");

  const json sidecar = {{"schema", kStateSchema},       {"dim", state.grid.dim()},
                        {"n", state.grid.n()},          {"t", state.time},
                        {"epsilon", state.epsilon},     {"labels", state.labels.ids()},
                        {"weights", state.labels.weights()}, {"drifts", drifts},
                        {"layout", layout}};
  if (!stem.parent_path().empty()) fs::create_directories(stem.parent_path());
  write_bytes_atomic(with_suffix(stem, ".meps"), encode_snapshot(make_snapshot(fields)));
  write_text_atomic(with_suffix(stem, ".json"), sidecar.dump(2) + "\n");
}

MepsState read_state(const fs::path& path) {
  const fs::path stem = strip(path);
  const json meta = read_json(with_suffix(stem, ".json"));
  try {
    if (meta.at("schema").get<std::string>() != kStateSchema) {
      throw MepsError(ErrorKind::kFormat, "unexpected state schema " + meta.at("schema").dump());
    }
    const TorusGrid grid(meta.at("dim").get<int>(), meta.at("n").get<int>());
    LabelSet labels(meta.at("labels").get<std::vector<std::string>>(), meta.at("weights").get<std::vector<double>>());
    const auto drifts = meta.at("drifts").get<std::vector<std::vector<double>>>();
    const Snapshot snap = decode_snapshot(read_bytes(with_suffix(stem, ".meps")));
    if (snap.dim != grid.dim() || snap.n != grid.n()) throw MepsError(ErrorKind::kFormat, "sidecar and dump disagree on grid");
    const std::size_t m = labels.size();
    if (snap.blocks.size() != 2 * m + 1 || drifts.size() != m) {
      throw MepsError(ErrorKind::kFormat, "block count does not match the label set");
    }
    std::vector<ScalarField> fields = snapshot_fields(snap);
    std::vector<Stream> streams;
    for (std::size_t a = 0; a < m; ++a) {
      if (drifts[a].size() != std::size_t(grid.dim())) throw MepsError(ErrorKind::kFormat, "drift has wrong dimension");
      Vec2 drift{drifts[a][0], grid.dim() == 2 ? drifts[a][1] : 0.0};
      streams.push_back({std::move(fields[2 * a]), std::move(fields[2 * a + 1]), drift});
    }
    return MepsState{meta.at("t").get<double>(), grid, std::move(labels), meta.at("epsilon").get<double>(),
                     std::move(streams), std::move(fields.back())};
  } catch (const json::exception& e) {
    throw MepsError(ErrorKind::kFormat, stem.string() + ".json: " + e.what());
  }
}

void write_trajectory(const Trajectory& trajectory, const fs::path& dir, std::size_t stride) {
  if (stride == 0) throw MepsError(ErrorKind::kInvalidArgument, "snapshot stride must be positive");
  // Stored samples must stay uniformly spaced for read_trajectory.
  if (trajectory.intervals() % stride != 0) {
    throw MepsError(ErrorKind::kInvalidArgument, "snapshot stride " + std::to_string(stride) +
                                                     " does not divide the " + std::to_string(trajectory.intervals()) +
                                                     " time steps");
  }
  fs::create_directories(dir);
  json files = json::array();
  const std::size_t count = trajectory.states.size();
  for (std::size_t k = 0; k < count; ++k) {
    if (k % stride != 0) continue;
    const std::string name = state_file_name(k);
    write_state(trajectory.states[k], dir / name);
    files.push_back(name);
  }
  const json index = {{"schema", kTrajectorySchema}, {"horizon", trajectory.horizon}, {"dt", trajectory.dt},
                      {"dealiased", trajectory.dealiased}, {"stride", stride}, {"states", files}};
  write_text_atomic(dir / "trajectory.json", index.dump(2) + "\n");
}

Trajectory read_trajectory(const fs::path& dir) {
  const json index = read_json(dir / "trajectory.json");
  Trajectory traj;
  try {
    if (index.at("schema").get<std::string>() != kTrajectorySchema) {
      throw MepsError(ErrorKind::kFormat, "unexpected trajectory schema " + index.at("schema").dump());
    }
    traj.horizon = index.at("horizon").get<double>();
    traj.dealiased = index.at("dealiased").get<bool>();
    const std::size_t stride = index.at("stride").get<std::size_t>();
    for (const auto& name : index.at("states")) traj.states.push_back(read_state(dir / name.get<std::string>()));
    traj.dt = index.at("dt").get<double>() * double(stride);
  } catch (const json::exception& e) {
    throw MepsError(ErrorKind::kFormat, (dir / "trajectory.json").string() + ": " + e.what());
  }
  if (traj.states.size() < 2) throw MepsError(ErrorKind::kFormat, "trajectory needs at least two states");
  check_time_grid(traj);
  return traj;
}

RoundTripReport check_round_trip(const fs::path& meps_file) {
  const std::vector<std::uint8_t> bytes = read_bytes(meps_file);
  const Snapshot snap = decode_snapshot(bytes);
  const std::vector<std::uint8_t> again = encode_snapshot(snap);
  return {again == bytes, bytes.size(), snap.blocks.size()};
}

}  // namespace meps
