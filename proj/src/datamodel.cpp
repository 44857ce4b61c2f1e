#include "yt8m/datamodel.hpp"

#include <algorithm>
#include <cmath>

#include "yt8m/error.hpp"

namespace yt8m {

void FeatureVector::concat_into(std::span<double> out) const {
  if (out.size() != size()) {
    fail(ErrorCode::BadDimension, std::to_string(size()) + " features into a row of " +
                                      std::to_string(out.size()));
  }
  auto it = std::copy(rgb.begin(), rgb.end(), out.begin());
  std::copy(audio.begin(), audio.end(), it);
}

bool valid_video_id(std::string_view id) noexcept {
  if (id.empty()) return false;
  return std::none_of(id.begin(), id.end(), [](unsigned char c) {
    return c == ',' || c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  });
}

void canonicalize_labels(Example& ex) { std::sort(ex.labels.begin(), ex.labels.end()); }

void validate_example(const Example& ex, const Schema& schema) {
  if (ex.video_id.empty()) fail(ErrorCode::EmptyVideoId, "video id is empty");
  if (!valid_video_id(ex.video_id)) {
    fail(ErrorCode::BadVideoId, "video id '" + ex.video_id + "' contains a comma or whitespace");
  }
  for (std::size_t i = 0; i < ex.labels.size(); ++i) {
    const ClassIndex label = ex.labels[i];
    if (label < 0 || static_cast<std::size_t>(label) >= schema.num_classes) {
      fail(ErrorCode::LabelOutOfRange, std::to_string(label));
    }
    if (i > 0 && ex.labels[i - 1] >= label) {
      fail(ErrorCode::DuplicateLabel, ex.video_id + " label " + std::to_string(label) +
                                          (ex.labels[i - 1] == label ? " repeated" : " out of order"));
    }
  }
  const std::size_t expected = schema.feature_dim();
  const std::size_t got = ex.features.size();
  if (ex.features.rgb.size() != schema.rgb_dim || ex.features.audio.size() != schema.audio_dim) {
    fail(ErrorCode::BadDimension, "expected " + std::to_string(expected) + ", got " +
                                      std::to_string(got));
  }
  auto finite = [](float v) { return std::isfinite(v); };
  if (!std::all_of(ex.features.rgb.begin(), ex.features.rgb.end(), finite) ||
      !std::all_of(ex.features.audio.begin(), ex.features.audio.end(), finite)) {
    fail(ErrorCode::NonFiniteValue, ex.video_id + " has a non-finite feature");
  }
}

PredictionList::PredictionList(std::string video_id, std::vector<LabelConfidence> pairs,
                               std::optional<std::size_t> k)
    : video_id_(std::move(video_id)), pairs_(std::move(pairs)) {
  if (video_id_.empty()) fail(ErrorCode::EmptyVideoId, "prediction list without a video id");
  if (!valid_video_id(video_id_)) {
    fail(ErrorCode::BadVideoId, "video id '" + video_id_ + "' contains a comma or whitespace");
  }
  for (auto& p : pairs_) {
    if (!std::isfinite(p.confidence)) {
      fail(ErrorCode::NonFiniteValue, video_id_ + " label " + std::to_string(p.label));
    }
    p.confidence = std::clamp(p.confidence, 0.0, 1.0);
  }
  std::sort(pairs_.begin(), pairs_.end(), ranks_before);
  // Duplicates may be far apart after sorting by confidence.
  std::vector<ClassIndex> labels;
  labels.reserve(pairs_.size());
  for (const auto& p : pairs_) labels.push_back(p.label);
  std::sort(labels.begin(), labels.end());
  if (auto dup = std::adjacent_find(labels.begin(), labels.end()); dup != labels.end()) {
    fail(ErrorCode::DuplicateLabel, video_id_ + " label " + std::to_string(*dup));
  }
  if (k && pairs_.size() > *k) pairs_.resize(*k);
}

}  // namespace yt8m
