#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace yt8m {

using ClassIndex = std::int32_t;

inline constexpr std::size_t kDefaultRgbDim = 1024;
inline constexpr std::size_t kDefaultAudioDim = 128;
inline constexpr std::size_t kDefaultNumClasses = 4800;
inline constexpr std::size_t kDefaultTopK = 20;

/// Per-video mean-pooled embeddings. Stored as f32, the on-disk precision.
struct FeatureVector {
  std::vector<float> rgb;
  std::vector<float> audio;

  std::size_t size() const noexcept { return rgb.size() + audio.size(); }
  /// rgb followed by audio, widened to double.
  void concat_into(std::span<double> out) const;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Shape of a dataset: vocabulary size and feature widths.
struct Schema {
  std::size_t num_classes = kDefaultNumClasses;
  std::size_t rgb_dim = kDefaultRgbDim;
  std::size_t audio_dim = kDefaultAudioDim;

  std::size_t feature_dim() const noexcept { return rgb_dim + audio_dim; }
  friend bool operator==(const Schema&, const Schema&) = default;
};

struct Example {
  std::string video_id;
  std::vector<ClassIndex> labels;  // ascending, unique
  FeatureVector features;

  friend bool operator==(const Example&, const Example&) = default;
};

/// Throws Error(EmptyVideoId | BadVideoId | LabelOutOfRange | DuplicateLabel |
/// BadDimension | NonFiniteValue) on the first violated invariant.
void validate_example(const Example& ex, const Schema& schema);

/// Sorts labels ascending; duplicates are left for validate_example to reject.
void canonicalize_labels(Example& ex);

/// Video ids are opaque: nonempty, no comma, no whitespace.
bool valid_video_id(std::string_view id) noexcept;

struct LabelConfidence {
  ClassIndex label = 0;
  double confidence = 0.0;

  friend bool operator==(const LabelConfidence&, const LabelConfidence&) = default;
};

/// Confidence descending, label ascending.
inline bool ranks_before(const LabelConfidence& a, const LabelConfidence& b) noexcept {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  return a.label < b.label;
}

/// One video's ranked predictions. Construction clamps confidences to [0,1],
/// sorts (confidence desc, label asc), rejects duplicate labels and
/// non-finite confidences, and truncates to k when a cap is given.
class PredictionList {
 public:
  PredictionList() = default;
  PredictionList(std::string video_id, std::vector<LabelConfidence> pairs,
                 std::optional<std::size_t> k = std::nullopt);

  const std::string& video_id() const noexcept { return video_id_; }
  const std::vector<LabelConfidence>& pairs() const noexcept { return pairs_; }
  std::size_t size() const noexcept { return pairs_.size(); }

  friend bool operator==(const PredictionList&, const PredictionList&) = default;

 private:
  std::string video_id_;
  std::vector<LabelConfidence> pairs_;
};

}  // namespace yt8m
