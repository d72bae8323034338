#include "meps/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "meps/errors.hpp"

namespace meps {
namespace {

constexpr char kMagic[5] = {'M', 'E', 'P', 'S', '1'};

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t((v >> (8 * i)) & 0xFFu));
}

void put_f64(std::vector<std::uint8_t>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(std::uint8_t((bits >> (8 * i)) & 0xFFu));
}

class Reader {
 public:
  explicit Reader(const std::vector<std::uint8_t>& bytes) : bytes_(bytes) {}

  void need(std::size_t count) const {
    if (pos_ + count > bytes_.size()) throw MepsError(ErrorKind::kFormat, "MEPS1 payload truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(bytes_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= std::uint64_t(bytes_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(bits);
  }
  void skip(std::size_t count) {
    need(count);
    pos_ += count;
  }
  bool at_end() const { return pos_ == bytes_.size(); }
  const std::uint8_t* cursor() const { return bytes_.data() + pos_; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode_snapshot(const Snapshot& snapshot) {
  const TorusGrid grid(snapshot.dim, snapshot.n);
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_u32(out, std::uint32_t(snapshot.dim));
  put_u32(out, std::uint32_t(snapshot.n));
  put_u32(out, std::uint32_t(snapshot.blocks.size()));
  out.reserve(out.size() + 8 * grid.size() * snapshot.blocks.size());
  for (const auto& block : snapshot.blocks) {
    if (block.size() != grid.size()) throw MepsError(ErrorKind::kFormat, "block size does not match grid");
    for (double v : block) put_f64(out, v);
  }
  return out;
}

Snapshot decode_snapshot(const std::vector<std::uint8_t>& bytes) {
  Reader in(bytes);
  in.need(sizeof(kMagic));
  if (std::memcmp(in.cursor(), kMagic, sizeof(kMagic)) != 0) {
    throw MepsError(ErrorKind::kFormat, "missing MEPS1 magic");
  }
  in.skip(sizeof(kMagic));
  Snapshot s;
  s.dim = int(in.u32());
  s.n = int(in.u32());
  const std::uint32_t count = in.u32();
  TorusGrid grid(1, 8);
  try {
    grid = TorusGrid(s.dim, s.n);
  } catch (const MepsError& e) {
    throw MepsError(ErrorKind::kFormat, e.what());
  }
  in.need(std::size_t(count) * grid.size() * 8);
  s.blocks.resize(count);
  for (auto& block : s.blocks) {
    block.resize(grid.size());
    for (double& v : block) v = in.f64();
  }
  if (!in.at_end()) throw MepsError(ErrorKind::kFormat, "trailing bytes after MEPS1 payload");
  return s;
}

Snapshot make_snapshot(const std::vector<const ScalarField*>& fields) {
  if (fields.empty()) throw MepsError(ErrorKind::kInvalidArgument, "snapshot needs at least one field");
  Snapshot s;
  s.dim = fields.front()->grid().dim();
  s.n = fields.front()->grid().n();
  for (const auto* f : fields) {
    if (!(f->grid() == fields.front()->grid())) {
      throw MepsError(ErrorKind::kInvalidArgument, "snapshot fields must share a grid");
    }
    s.blocks.emplace_back(f->values().begin(), f->values().end());
  }
  return s;
}

std::vector<ScalarField> snapshot_fields(const Snapshot& snapshot) {
  const TorusGrid grid(snapshot.dim, snapshot.n);
  std::vector<ScalarField> out;
  for (const auto& block : snapshot.blocks) out.emplace_back(grid, block);
  return out;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MepsError(ErrorKind::kFormat, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw MepsError(ErrorKind::kFormat, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw MepsError(ErrorKind::kFormat, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  write_bytes_atomic(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

}  // namespace meps
