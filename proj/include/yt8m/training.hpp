#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "yt8m/dataset.hpp"
#include "yt8m/error.hpp"
#include "yt8m/graph.hpp"
#include "yt8m/metrics.hpp"
#include "yt8m/optimizer.hpp"

namespace yt8m {

enum class LossKind : std::uint8_t { sigmoid_ce, softmax_ce };

/// Scores are clipped to [1e-12, 1 - 1e-12] inside the logarithms.
inline constexpr double kScoreClip = 1e-12;

struct LossResult {
  double loss = 0.0;
  Tensor2 grad;  // d loss / d scores
};

/// sigmoid_ce: mean over batch and classes of binary cross-entropy.
/// softmax_ce: mean over batch of cross-entropy against the multi-hot row
/// divided by its positive count. Errors: ShapeMismatch, EmptyLabelRow.
LossResult loss_and_grad(const Tensor2& scores, const Tensor2& labels, LossKind kind);

/// sigmoid_ce for sigmoid or mixture heads, softmax_ce for a softmax head.
LossKind default_loss(const ModelGraph& graph);

struct TrainConfig {
  OptimizerConfig optimizer;
  std::optional<LossKind> loss;  // empty: default_loss(graph)
  bool include_validation = false;
  std::size_t eval_every = 100;
  std::uint64_t shuffle_seed = 0;
  std::optional<std::filesystem::path> checkpoint_path;
  std::size_t k = kDefaultTopK;
  std::size_t monitor_size = 1024;  // examples in the GAP monitoring slice
  bool float32_params = false;      // round parameters to f32 after every update
};

struct TrainReport {
  std::size_t steps_run = 0;
  std::vector<std::pair<std::size_t, double>> loss_curve;
  std::vector<std::pair<std::size_t, double>> train_gap_curve;

  friend bool operator==(const TrainReport&, const TrainReport&) = default;
};

/// Thrown when a step produces a non-finite loss; carries the report so far.
class TrainingAborted : public Error {
 public:
  TrainingAborted(std::size_t step, TrainReport partial);
  const TrainReport& partial_report() const noexcept { return partial_; }

 private:
  TrainReport partial_;
};

/// Mini-batch training for max_steps updates. The pool (train, plus
/// validation when include_validation) is reshuffled every epoch with a seed
/// derived from (shuffle_seed, epoch); the last partial batch is kept. Loss
/// is recorded every step, GAP@k on the monitoring slice every eval_every
/// steps and after the last step. The slice is the head of `validation` when
/// it is given but not trained on, else the head of the training pool.
TrainReport train(ModelGraph& graph, const Dataset& data, const Dataset* validation,
                  const TrainConfig& cfg);

/// Scores every example in infer mode.
Tensor2 predict(const ModelGraph& graph, const Dataset& data, std::size_t batch_size = 256);
std::vector<PredictionList> predict_top_k(const ModelGraph& graph, const Dataset& data,
                                          std::size_t k);
std::vector<PredictionList> top_k_lists(const Tensor2& scores, const Dataset& data, std::size_t k);
GapReport evaluate(const ModelGraph& graph, const Dataset& data, std::size_t k);

/// "step,loss,gap" with an empty gap field on steps that were not scored.
std::string report_csv(const TrainReport& report);
void write_report_csv(const std::filesystem::path& path, const TrainReport& report);

/// Shortest decimal that round-trips the value.
std::string format_real(double v);

}  // namespace yt8m
