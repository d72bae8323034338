#pragma once

#include <cstddef>
#include <filesystem>
#include <string>

#include "meps/multistream_state.hpp"

namespace meps {

inline constexpr const char* kStateSchema = "meps-state/1";
inline constexpr const char* kTrajectorySchema = "meps-trajectory/1";

/// Writes `<stem>.meps` (blocks c_1, theta_1, ..., c_m, theta_m, psi) and the
/// sidecar `<stem>.json` with labels, weights, epsilon, t and drifts.
void write_state(const MepsState& state, const std::filesystem::path& stem);
/// Accepts the stem, the `.meps` file or the `.json` sidecar. psi is read, not re-solved.
MepsState read_state(const std::filesystem::path& path);

/// Writes trajectory.json plus every stride-th state; stride must divide the step count.
void write_trajectory(const Trajectory& trajectory, const std::filesystem::path& dir, std::size_t stride = 1);
/// Throws MepsError(kValidationFailed) if the stored samples are not uniformly spaced.
Trajectory read_trajectory(const std::filesystem::path& dir);

struct RoundTripReport {
  bool bit_exact = false;
  std::size_t bytes = 0;
  std::size_t blocks = 0;
};
/// Decodes a MEPS1 file and re-encodes it, comparing byte for byte.
RoundTripReport check_round_trip(const std::filesystem::path& meps_file);

}  // namespace meps
