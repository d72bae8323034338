#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "meps/torus_field.hpp"

namespace meps {

/// Binary field container: "MEPS1", then d, n, block count as u32 LE, then each
/// block's n^d values as f64 LE in row-major order.
struct Snapshot {
  int dim = 1;
  int n = 8;
  std::vector<std::vector<double>> blocks;
};

std::vector<std::uint8_t> encode_snapshot(const Snapshot& snapshot);
/// Throws MepsError(kFormat) on a bad magic, truncated payload, or trailing bytes.
Snapshot decode_snapshot(const std::vector<std::uint8_t>& bytes);

Snapshot make_snapshot(const std::vector<const ScalarField*>& fields);
std::vector<ScalarField> snapshot_fields(const Snapshot& snapshot);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
/// Writes through a temporary sibling file and renames it into place.
void write_bytes_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace meps
