#include "yt8m/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "yt8m/error.hpp"

namespace yt8m {

std::vector<LabelConfidence> top_k(std::span<const double> scores, std::size_t k) {
  std::vector<LabelConfidence> pairs(scores.size());
  for (std::size_t c = 0; c < scores.size(); ++c) {
    pairs[c] = {static_cast<ClassIndex>(c), scores[c]};
  }
  const std::size_t keep = std::min(k, pairs.size());
  std::partial_sort(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(keep), pairs.end(),
                    ranks_before);
  pairs.resize(keep);
  return pairs;
}

GapAccumulator::GapAccumulator(const GroundTruth& truth, std::size_t k) : truth_(truth), k_(k) {}

void GapAccumulator::add(const PredictionList& list) {
  auto truth_it = truth_.find(list.video_id());
  if (truth_it == truth_.end()) fail(ErrorCode::UnknownVideo, list.video_id());
  const auto& positives = truth_it->second;

  auto [it, inserted] = index_of_.try_emplace(list.video_id(),
                                              static_cast<std::uint32_t>(ids_.size()));
  if (inserted) {
    ids_.push_back(list.video_id());
  } else {
    repeated_video_ = true;
  }
  const std::uint32_t video = it->second;
  const std::size_t n = std::min(k_, list.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = list.pairs()[i];
    const bool correct = std::binary_search(positives.begin(), positives.end(), p.label);
    entries_.push_back({p.confidence, video, static_cast<std::uint32_t>(p.label), correct});
  }
}

GapReport GapAccumulator::finish(bool keep_curve) {
  if (repeated_video_) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> keys;
    keys.reserve(entries_.size());
    for (const auto& e : entries_) keys.emplace_back(e.video, e.label);
    std::sort(keys.begin(), keys.end());
    if (auto dup = std::adjacent_find(keys.begin(), keys.end()); dup != keys.end()) {
      fail(ErrorCode::DuplicatePrediction,
           ids_[dup->first] + " label " + std::to_string(dup->second));
    }
  }

  // Replace first-seen indices by ranks in ascending id order.
  std::vector<std::uint32_t> order(ids_.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return ids_[a] < ids_[b]; });
  std::vector<std::uint32_t> rank(ids_.size());
  for (std::uint32_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
  for (auto& e : entries_) e.video = rank[e.video];

  kernels::sort_pooled(entries_);

  GapReport report;
  report.num_predictions = entries_.size();
  for (const auto& [id, labels] : truth_) report.total_positives += labels.size();
  if (report.total_positives == 0) return report;

  const double positives = static_cast<double>(report.total_positives);
  double precision_sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].correct) {
      ++hits;
      precision_sum += static_cast<double>(hits) / static_cast<double>(i + 1);
    }
    if (keep_curve) {
      report.precision_recall.emplace_back(static_cast<double>(hits) / static_cast<double>(i + 1),
                                           static_cast<double>(hits) / positives);
    }
  }
  report.gap = precision_sum / positives;
  return report;
}

GapReport gap_at_k(std::span<const PredictionList> predictions, const GroundTruth& truth,
                   std::size_t k, bool keep_curve) {
  GapAccumulator acc(truth, k);
  for (const auto& list : predictions) acc.add(list);
  return acc.finish(keep_curve);
}

}  // namespace yt8m
