#include "yt8m/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

#include "le_bytes.hpp"
#include "yt8m/error.hpp"

namespace yt8m {

namespace {

constexpr char kMagic[4] = {'Y', 'T', 'C', 'K'};
constexpr char kVersion = 0x01;

class Cursor {
 public:
  explicit Cursor(std::string_view buf) : buf_(buf) {}

  const char* take(std::size_t n) {
    if (buf_.size() - pos_ < n) {
      fail(ErrorCode::BadCheckpoint, "truncated at byte " + std::to_string(pos_));
    }
    const char* p = buf_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::uint8_t u8() { return static_cast<std::uint8_t>(*take(1)); }
  std::uint16_t u16() { return le::get_u16(take(2)); }
  std::uint32_t u32() { return le::get_u32(take(4)); }
  std::uint64_t u64() { return le::get_u64(take(8)); }
  double f64() { return le::get_f64(take(8)); }
  bool done() const noexcept { return pos_ == buf_.size(); }

 private:
  std::string_view buf_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const ModelGraph& graph) {
  std::string out(kMagic, 4);
  out.push_back(kVersion);
  le::put_u64(out, graph.seed());
  le::put_u64(out, graph.mask_step());
  out.push_back(static_cast<char>(graph.reg().norm));
  le::put_f64(out, graph.reg().penalty);
  const auto& nodes = graph.nodes();
  le::put_u32(out, static_cast<std::uint32_t>(nodes.size()));
  for (const Node& n : nodes) {
    out.push_back(static_cast<char>(n.kind));
    le::put_u16(out, static_cast<std::uint16_t>(n.name.size()));
    out.append(n.name);
    le::put_u32(out, static_cast<std::uint32_t>(n.out_dim));
    out.push_back(static_cast<char>(n.trainable ? 1 : 0));
    out.push_back(static_cast<char>(n.init));
    le::put_f64(out, n.keep_prob);
    le::put_f64(out, n.scale);
    le::put_u32(out, static_cast<std::uint32_t>(n.group));
    le::put_u32(out, static_cast<std::uint32_t>(n.classes));
    le::put_u16(out, static_cast<std::uint16_t>(n.inputs.size()));
    for (std::size_t in : n.inputs) le::put_u32(out, static_cast<std::uint32_t>(in));
    le::put_u16(out, static_cast<std::uint16_t>(n.params.size()));
    for (const Tensor2& p : n.params) {
      le::put_u32(out, static_cast<std::uint32_t>(p.rows()));
      le::put_u32(out, static_cast<std::uint32_t>(p.cols()));
    }
  }
  for (const Node& n : nodes) {
    for (const Tensor2& p : n.params) {
      for (double v : p.values()) le::put_f64(out, v);
    }
  }
  return out;
}

ModelGraph deserialize_checkpoint(std::string_view bytes) {
  if (bytes.size() < 5 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    fail(ErrorCode::BadMagic, "not a YTCK checkpoint");
  }
  if (bytes[4] != kVersion) fail(ErrorCode::BadMagic, "unsupported checkpoint version");
  Cursor cur(bytes.substr(5));
  const std::uint64_t seed = cur.u64();
  const std::uint64_t mask_step = cur.u64();
  RegConfig reg;
  const std::uint8_t norm = cur.u8();
  if (norm > static_cast<std::uint8_t>(Norm::l2)) fail(ErrorCode::BadCheckpoint, "unknown norm");
  reg.norm = static_cast<Norm>(norm);
  reg.penalty = cur.f64();
  const std::uint32_t count = cur.u32();
  if (count == 0) fail(ErrorCode::BadCheckpoint, "no nodes");

  std::vector<Node> nodes(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    Node& n = nodes[i];
    const std::uint8_t kind = cur.u8();
    if (kind > static_cast<std::uint8_t>(NodeKind::mixture)) {
      fail(ErrorCode::BadCheckpoint, "unknown node kind " + std::to_string(kind));
    }
    n.kind = static_cast<NodeKind>(kind);
    const std::uint16_t name_len = cur.u16();
    n.name.assign(cur.take(name_len), name_len);
    n.out_dim = cur.u32();
    n.trainable = cur.u8() != 0;
    const std::uint8_t init = cur.u8();
    if (init > static_cast<std::uint8_t>(InitKind::identity_or_glorot)) {
      fail(ErrorCode::BadCheckpoint, "unknown init kind");
    }
    n.init = static_cast<InitKind>(init);
    n.keep_prob = cur.f64();
    n.scale = cur.f64();
    n.group = cur.u32();
    n.classes = cur.u32();
    const std::uint16_t inputs = cur.u16();
    for (std::uint16_t k = 0; k < inputs; ++k) {
      const std::uint32_t in = cur.u32();
      if (in >= i) fail(ErrorCode::BadCheckpoint, n.name + " reads a later node");
      n.inputs.push_back(in);
    }
    const std::uint16_t params = cur.u16();
    for (std::uint16_t k = 0; k < params; ++k) {
      const std::uint32_t rows = cur.u32();
      const std::uint32_t cols = cur.u32();
      n.params.emplace_back(rows, cols);
    }
  }
  for (Node& n : nodes) {
    for (Tensor2& p : n.params) {
      for (double& v : p.values()) v = cur.f64();
    }
  }
  if (!cur.done()) fail(ErrorCode::BadCheckpoint, "trailing bytes");
  if (nodes[0].kind != NodeKind::input) fail(ErrorCode::BadCheckpoint, "first node is not the input");

  ModelGraph graph(nodes[0].out_dim, seed);
  for (std::size_t i = 1; i < nodes.size(); ++i) graph.append(std::move(nodes[i]));
  graph.set_reg(reg);
  graph.set_mask_step(mask_step);
  return graph;
}

void save_checkpoint(const std::filesystem::path& path, const ModelGraph& graph) {
  const std::string bytes = serialize_checkpoint(graph);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) fail(ErrorCode::Io, "write failed on " + path.string());
}

ModelGraph load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorCode::Io, "read failed on " + path.string());
  return deserialize_checkpoint(bytes);
}

}  // namespace yt8m
