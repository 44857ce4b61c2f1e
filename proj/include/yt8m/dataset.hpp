#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "yt8m/datamodel.hpp"
#include "yt8m/tensor.hpp"

namespace yt8m {

/// An in-memory dataset. Every example has passed validate_example against
/// the schema.
struct Dataset {
  Schema schema;
  std::vector<Example> examples;

  std::size_t size() const noexcept { return examples.size(); }
  bool empty() const noexcept { return examples.empty(); }
};

enum class DataFormat { native, tfrecord };

/// Streaming reader for the native "YT8V" format:
///   "YT8V" 0x01 | u32 num_classes | u32 rgb_dim | u32 audio_dim
///   per record: u16 id_len, id, u16 label_count, u32 labels..., f32 rgb..., f32 audio...
class NativeReader {
 public:
  explicit NativeReader(const std::filesystem::path& path);

  const Schema& schema() const noexcept { return schema_; }
  std::optional<Example> next();

 private:
  void read_exact(char* dst, std::size_t n, const char* what);

  std::filesystem::path path_;
  std::ifstream in_;
  std::uint64_t file_size_ = 0;
  std::uint64_t offset_ = 0;
  Schema schema_;
};

void write_native(const std::filesystem::path& path, const Dataset& data);
void write_tfrecord_dataset(const std::filesystem::path& path, const Dataset& data);
void write_dataset(const std::filesystem::path& path, const Dataset& data, DataFormat format);

/// Detects the format by magic. Native files carry their own schema; TFRecord
/// files are decoded against `tfrecord_schema`.
DataFormat detect_format(const std::filesystem::path& path);
Dataset load_dataset(const std::filesystem::path& path, const Schema& tfrecord_schema = {});

/// Rows of concatenated rgb||audio features for the selected examples.
Tensor2 feature_batch(const Dataset& data, std::span<const std::size_t> indices);
Tensor2 feature_batch(const Dataset& data);
/// Multi-hot label rows (batch x num_classes).
Tensor2 label_batch(const Dataset& data, std::span<const std::size_t> indices);

using GroundTruth = std::unordered_map<std::string, std::vector<ClassIndex>>;
GroundTruth ground_truth(const Dataset& data);

/// Splits off the last `tail` examples: {head, tail}.
std::pair<Dataset, Dataset> split_tail(const Dataset& data, std::size_t tail);

// --- synthetic data ----------------------------------------------------------

struct SyntheticConfig {
  std::size_t num_videos = 1000;
  std::size_t num_classes = 25;
  std::size_t rgb_dim = kDefaultRgbDim;
  std::size_t audio_dim = kDefaultAudioDim;
  std::uint64_t seed = 1;
  double teacher_sparsity = 0.3;
  double noise_std = 0.1;
};

/// Labels come from a hidden linear teacher over N(0,1) features: class c is
/// positive iff w_c . x + b_c > 0. Each teacher weight is nonzero with
/// probability teacher_sparsity; b_c = u_c * |w_c| with u_c ~ U(-1,1), so each
/// class has a positive rate between about 0.16 and 0.84. Videos without any
/// positive label are redrawn. Stored features get N(0, noise_std^2) noise
/// added after labeling. A pure function of the config.
Dataset generate_synthetic(const SyntheticConfig& cfg);

}  // namespace yt8m
