#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "yt8m/datamodel.hpp"
#include "yt8m/dataset.hpp"
#include "yt8m/kernels.hpp"

namespace yt8m {

/// The k highest scores as (label, confidence), confidence descending with
/// ties broken by ascending label. Returns all pairs when the row is shorter
/// than k.
std::vector<LabelConfidence> top_k(std::span<const double> scores, std::size_t k);

struct GapReport {
  double gap = 0.0;
  std::size_t num_predictions = 0;  // N, the pooled list length
  std::size_t total_positives = 0;
  std::vector<std::pair<double, double>> precision_recall;  // (p(i), r(i)), when requested
};

/// Global average precision over the pooled top-k predictions of every
/// video: sort all (video, label, confidence) triples by confidence desc,
/// video id asc, label asc, and sum p(i) * delta r(i), where delta r(i) is
/// 1 / total_positives for a correct prediction and 0 otherwise.
/// total_positives counts every ground-truth label of every video.
///
/// Lists are fed one at a time so that a submission can be scored while it
/// streams from disk.
class GapAccumulator {
 public:
  GapAccumulator(const GroundTruth& truth, std::size_t k);

  /// Truncates to k. Errors: UnknownVideo(id).
  void add(const PredictionList& list);
  /// Errors: DuplicatePrediction(video, label).
  GapReport finish(bool keep_curve = false);

  std::size_t videos_seen() const noexcept { return ids_.size(); }

 private:
  const GroundTruth& truth_;
  std::size_t k_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, std::uint32_t> index_of_;
  std::vector<PooledEntry> entries_;
  bool repeated_video_ = false;
};

GapReport gap_at_k(std::span<const PredictionList> predictions, const GroundTruth& truth,
                   std::size_t k, bool keep_curve = false);

}  // namespace yt8m
