#include "yt8m/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "le_bytes.hpp"
#include "yt8m/error.hpp"
#include "yt8m/example_proto.hpp"
#include "yt8m/rng.hpp"
#include "yt8m/tfrecord.hpp"

namespace yt8m {

namespace {

constexpr char kNativeMagic[4] = {'Y', 'T', '8', 'V'};
constexpr char kNativeVersion = 0x01;
constexpr std::size_t kNativeHeader = 4 + 1 + 12;

void append_example(std::string& out, const Example& ex) {
  if (ex.video_id.size() > 0xffff) fail(ErrorCode::BadVideoId, "video id longer than 65535 bytes");
  if (ex.labels.size() > 0xffff) fail(ErrorCode::InvalidConfig, "more than 65535 labels");
  le::put_u16(out, static_cast<std::uint16_t>(ex.video_id.size()));
  out.append(ex.video_id);
  le::put_u16(out, static_cast<std::uint16_t>(ex.labels.size()));
  for (ClassIndex l : ex.labels) le::put_u32(out, static_cast<std::uint32_t>(l));
  for (float v : ex.features.rgb) le::put_f32(out, v);
  for (float v : ex.features.audio) le::put_f32(out, v);
}

}  // namespace

NativeReader::NativeReader(const std::filesystem::path& path)
    : path_(path), in_(path, std::ios::binary) {
  if (!in_) fail(ErrorCode::Io, "cannot open " + path.string());
  std::error_code ec;
  file_size_ = std::filesystem::file_size(path, ec);
  if (ec) fail(ErrorCode::Io, "cannot stat " + path.string() + ": " + ec.message());
  char header[kNativeHeader];
  // A foreign file is BadMagic even when shorter than a header.
  read_exact(header, std::min<std::size_t>(4, file_size_), "magic");
  if (file_size_ < 4 || std::memcmp(header, kNativeMagic, 4) != 0) fail(ErrorCode::BadMagic, path.string());
  read_exact(header + 4, kNativeHeader - 4, "header");
  if (header[4] != kNativeVersion) {
    fail(ErrorCode::BadMagic, path.string() + " has unsupported version " +
                                  std::to_string(static_cast<int>(header[4])));
  }
  schema_.num_classes = le::get_u32(header + 5);
  schema_.rgb_dim = le::get_u32(header + 9);
  schema_.audio_dim = le::get_u32(header + 13);
  if (schema_.num_classes == 0) fail(ErrorCode::InvalidConfig, path.string() + " has zero classes");
}

void NativeReader::read_exact(char* dst, std::size_t n, const char* what) {
  if (file_size_ - offset_ < n) {
    fail(ErrorCode::TruncatedRecord, std::string(what) + " at offset " + std::to_string(offset_));
  }
  if (!in_.read(dst, static_cast<std::streamsize>(n))) {
    fail(ErrorCode::Io, "read failed at offset " + std::to_string(offset_));
  }
  offset_ += n;
}

std::optional<Example> NativeReader::next() {
  if (offset_ == file_size_) return std::nullopt;
  char buf[4];
  Example ex;
  read_exact(buf, 2, "id length");
  ex.video_id.resize(le::get_u16(buf));
  read_exact(ex.video_id.data(), ex.video_id.size(), "video id");
  read_exact(buf, 2, "label count");
  ex.labels.resize(le::get_u16(buf));
  for (auto& l : ex.labels) {
    read_exact(buf, 4, "label");
    const std::uint32_t raw = le::get_u32(buf);
    if (raw > 0x7fffffffu) fail(ErrorCode::LabelOutOfRange, std::to_string(raw));
    l = static_cast<ClassIndex>(raw);
  }
  std::string floats((schema_.rgb_dim + schema_.audio_dim) * 4, '\0');
  read_exact(floats.data(), floats.size(), "features");
  ex.features.rgb.resize(schema_.rgb_dim);
  ex.features.audio.resize(schema_.audio_dim);
  for (std::size_t i = 0; i < schema_.rgb_dim; ++i) ex.features.rgb[i] = le::get_f32(&floats[4 * i]);
  for (std::size_t i = 0; i < schema_.audio_dim; ++i) {
    ex.features.audio[i] = le::get_f32(&floats[4 * (schema_.rgb_dim + i)]);
  }
  canonicalize_labels(ex);
  validate_example(ex, schema_);
  return ex;
}

void write_native(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  std::string buf(kNativeMagic, 4);
  buf.push_back(kNativeVersion);
  le::put_u32(buf, static_cast<std::uint32_t>(data.schema.num_classes));
  le::put_u32(buf, static_cast<std::uint32_t>(data.schema.rgb_dim));
  le::put_u32(buf, static_cast<std::uint32_t>(data.schema.audio_dim));
  for (const auto& ex : data.examples) {
    validate_example(ex, data.schema);
    append_example(buf, ex);
    if (buf.size() > (1u << 20)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  out.flush();
  if (!out) fail(ErrorCode::Io, "write failed on " + path.string());
}

void write_tfrecord_dataset(const std::filesystem::path& path, const Dataset& data) {
  TfRecordWriter writer(path);
  for (const auto& ex : data.examples) {
    validate_example(ex, data.schema);
    writer.write(encode_video_example(ex));
  }
  writer.close();
}

void write_dataset(const std::filesystem::path& path, const Dataset& data, DataFormat format) {
  if (format == DataFormat::native) {
    write_native(path, data);
  } else {
    write_tfrecord_dataset(path, data);
  }
}

DataFormat detect_format(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() == 4 && std::memcmp(magic, kNativeMagic, 4) == 0) return DataFormat::native;
  return DataFormat::tfrecord;
}

Dataset load_dataset(const std::filesystem::path& path, const Schema& tfrecord_schema) {
  Dataset data;
  if (detect_format(path) == DataFormat::native) {
    NativeReader reader(path);
    data.schema = reader.schema();
    while (auto ex = reader.next()) data.examples.push_back(std::move(*ex));
  } else {
    data.schema = tfrecord_schema;
    TfRecordReader reader(path);
    while (auto rec = reader.next()) {
      data.examples.push_back(decode_video_example(*rec, data.schema));
    }
  }
  return data;
}

Tensor2 feature_batch(const Dataset& data, std::span<const std::size_t> indices) {
  Tensor2 out(indices.size(), data.schema.feature_dim());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    data.examples[indices[r]].features.concat_into(out.row(r));
  }
  return out;
}

Tensor2 feature_batch(const Dataset& data) {
  std::vector<std::size_t> all(data.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return feature_batch(data, all);
}

Tensor2 label_batch(const Dataset& data, std::span<const std::size_t> indices) {
  Tensor2 out(indices.size(), data.schema.num_classes);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    for (ClassIndex l : data.examples[indices[r]].labels) out(r, static_cast<std::size_t>(l)) = 1.0;
  }
  return out;
}

GroundTruth ground_truth(const Dataset& data) {
  GroundTruth truth;
  truth.reserve(data.size());
  for (const auto& ex : data.examples) {
    if (!truth.emplace(ex.video_id, ex.labels).second) {
      fail(ErrorCode::DuplicateVideo, ex.video_id);
    }
  }
  return truth;
}

std::pair<Dataset, Dataset> split_tail(const Dataset& data, std::size_t tail) {
  tail = std::min(tail, data.size());
  const auto cut = data.examples.begin() + static_cast<std::ptrdiff_t>(data.size() - tail);
  Dataset head{data.schema, {data.examples.begin(), cut}};
  Dataset rest{data.schema, {cut, data.examples.end()}};
  return {std::move(head), std::move(rest)};
}

Dataset generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.num_classes == 0) fail(ErrorCode::InvalidConfig, "num_classes must be positive");
  if (cfg.rgb_dim + cfg.audio_dim == 0) fail(ErrorCode::InvalidConfig, "feature dimension is zero");
  if (!(cfg.teacher_sparsity > 0.0 && cfg.teacher_sparsity <= 1.0)) {
    fail(ErrorCode::InvalidConfig, "teacher_sparsity must lie in (0,1]");
  }
  if (!(cfg.noise_std >= 0.0) || !std::isfinite(cfg.noise_std)) {
    fail(ErrorCode::InvalidConfig, "noise_std must be a finite nonnegative number");
  }

  const std::size_t dim = cfg.rgb_dim + cfg.audio_dim;
  const std::size_t classes = cfg.num_classes;

  Rng teacher_rng(derive_seed(cfg.seed, hash_name("teacher")));
  Tensor2 weights(classes, dim);
  std::vector<double> bias(classes);
  for (std::size_t c = 0; c < classes; ++c) {
    auto w = weights.row(c);
    double norm_sq = 0.0;
    for (auto& v : w) {
      if (teacher_rng.bernoulli(cfg.teacher_sparsity)) v = teacher_rng.normal();
      norm_sq += v * v;
    }
    if (norm_sq == 0.0) {
      auto& v = w[teacher_rng.below(dim)];
      v = teacher_rng.normal();
      norm_sq = v * v;
    }
    bias[c] = teacher_rng.uniform(-1.0, 1.0) * std::sqrt(norm_sq);
  }

  Dataset data;
  data.schema = {classes, cfg.rgb_dim, cfg.audio_dim};
  data.examples.reserve(cfg.num_videos);
  Rng feature_rng(derive_seed(cfg.seed, hash_name("features")));
  std::vector<double> x(dim);
  char id[32];
  for (std::size_t v = 0; v < cfg.num_videos; ++v) {
    Example ex;
    std::snprintf(id, sizeof id, "v%08zu", v);
    ex.video_id = id;
    do {
      ex.labels.clear();
      for (auto& xi : x) xi = feature_rng.normal();
      for (std::size_t c = 0; c < classes; ++c) {
        const auto w = weights.row(c);
        double score = bias[c];
        for (std::size_t d = 0; d < dim; ++d) score += w[d] * x[d];
        if (score > 0.0) ex.labels.push_back(static_cast<ClassIndex>(c));
      }
    } while (ex.labels.empty());
    ex.features.rgb.resize(cfg.rgb_dim);
    ex.features.audio.resize(cfg.audio_dim);
    for (std::size_t d = 0; d < dim; ++d) {
      const double noisy = x[d] + (cfg.noise_std > 0.0 ? cfg.noise_std * feature_rng.normal() : 0.0);
      if (d < cfg.rgb_dim) {
        ex.features.rgb[d] = static_cast<float>(noisy);
      } else {
        ex.features.audio[d - cfg.rgb_dim] = static_cast<float>(noisy);
      }
    }
    data.examples.push_back(std::move(ex));
  }
  return data;
}

}  // namespace yt8m
