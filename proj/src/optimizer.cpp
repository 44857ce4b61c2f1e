#include "yt8m/optimizer.hpp"

#include <cmath>
#include <string>

#include "yt8m/error.hpp"

namespace yt8m {

void OptimizerConfig::validate() const {
  if (!(base_learning_rate > 0.0) || !std::isfinite(base_learning_rate)) {
    fail(ErrorCode::BadSpec, "base_learning_rate must be positive");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0)) {
    fail(ErrorCode::BadSpec, "adam needs beta1, beta2 in [0,1) and epsilon > 0");
  }
  if (batch_size == 0) fail(ErrorCode::BadSpec, "batch_size must be positive");
}

Optimizer::Optimizer(OptimizerConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void Optimizer::step(std::span<Tensor2* const> params, std::span<const Tensor2* const> grads) {
  if (params.size() != grads.size()) {
    fail(ErrorCode::ShapeMismatch, std::to_string(params.size()) + " parameters, " +
                                       std::to_string(grads.size()) + " gradients");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->same_shape(*grads[i])) {
      fail(ErrorCode::ShapeMismatch, "gradient " + std::to_string(i) + " does not match its parameter");
    }
  }
  const double lr = cfg_.base_learning_rate;

  if (cfg_.kind == OptimizerKind::sgd) {
    ++t_;
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto w = params[i]->values();
      const auto g = grads[i]->values();
      for (std::size_t k = 0; k < w.size(); ++k) w[k] -= lr * g[k];
    }
    return;
  }

  if (m_.empty()) {
    for (const Tensor2* p : params) {
      m_.emplace_back(p->rows(), p->cols());
      v_.emplace_back(p->rows(), p->cols());
    }
  } else if (m_.size() != params.size()) {
    fail(ErrorCode::ShapeMismatch, "parameter set changed between optimizer steps");
  }
  ++t_;
  const double t = static_cast<double>(t_);
  const double correction1 = 1.0 - std::pow(cfg_.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg_.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!m_[i].same_shape(*params[i])) {
      fail(ErrorCode::ShapeMismatch, "parameter " + std::to_string(i) + " changed shape");
    }
    auto w = params[i]->values();
    const auto g = grads[i]->values();
    auto m = m_[i].values();
    auto v = v_[i].values();
    for (std::size_t k = 0; k < w.size(); ++k) {
      m[k] = cfg_.beta1 * m[k] + (1.0 - cfg_.beta1) * g[k];
      v[k] = cfg_.beta2 * v[k] + (1.0 - cfg_.beta2) * g[k] * g[k];
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      w[k] -= lr * m_hat / (std::sqrt(v_hat) + cfg_.epsilon);
    }
  }
}

void Optimizer::step(ModelGraph& graph, const Gradients& grads) {
  auto& nodes = graph.nodes();
  if (grads.size() != nodes.size()) {
    fail(ErrorCode::ShapeMismatch, "gradients for a different graph");
  }
  std::vector<Tensor2*> params;
  std::vector<const Tensor2*> gs;
  for (std::size_t id = 0; id < nodes.size(); ++id) {
    if (!nodes[id].trainable) continue;
    if (grads[id].size() != nodes[id].params.size()) {
      fail(ErrorCode::ShapeMismatch, "missing gradient for " + nodes[id].name);
    }
    for (std::size_t p = 0; p < nodes[id].params.size(); ++p) {
      params.push_back(&nodes[id].params[p]);
      gs.push_back(&grads[id][p]);
    }
  }
  step(params, gs);
}

}  // namespace yt8m
