#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "yt8m/graph.hpp"
#include "yt8m/tensor.hpp"

namespace yt8m {

enum class OptimizerKind : std::uint8_t { sgd, adam };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::adam;
  double base_learning_rate = 0.01;  // constant; no decay schedule
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t batch_size = 128;
  std::size_t max_steps = 1000;

  void validate() const;
};

/// sgd:  w <- w - lr * g
/// adam: m <- b1 m + (1-b1) g;  v <- b2 v + (1-b2) g^2;
///       w <- w - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
/// Moment buffers are allocated on the first step and keyed by position.
class Optimizer {
 public:
  explicit Optimizer(OptimizerConfig cfg);

  const OptimizerConfig& config() const noexcept { return cfg_; }
  std::uint64_t steps_taken() const noexcept { return t_; }

  /// Updates params[i] with grads[i]. Errors: ShapeMismatch.
  void step(std::span<Tensor2* const> params, std::span<const Tensor2* const> grads);
  /// Updates every trainable parameter of the graph.
  void step(ModelGraph& graph, const Gradients& grads);

 private:
  OptimizerConfig cfg_;
  std::uint64_t t_ = 0;
  std::vector<Tensor2> m_;
  std::vector<Tensor2> v_;
};

}  // namespace yt8m
