#include "yt8m/training.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include "yt8m/checkpoint.hpp"
#include "yt8m/rng.hpp"

namespace yt8m {

TrainingAborted::TrainingAborted(std::size_t step, TrainReport partial)
    : Error(ErrorCode::NonFiniteLoss, "step " + std::to_string(step)), partial_(std::move(partial)) {}

LossResult loss_and_grad(const Tensor2& scores, const Tensor2& labels, LossKind kind) {
  if (!scores.same_shape(labels)) {
    fail(ErrorCode::ShapeMismatch, "scores and labels differ in shape");
  }
  LossResult out{0.0, Tensor2(scores.rows(), scores.cols())};
  if (scores.rows() == 0) return out;
  const double batch = static_cast<double>(scores.rows());

  if (kind == LossKind::sigmoid_ce) {
    const double count = batch * static_cast<double>(scores.cols());
    const auto s = scores.values();
    const auto y = labels.values();
    auto g = out.grad.values();
    double total = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double p = std::clamp(s[i], kScoreClip, 1.0 - kScoreClip);
      total -= y[i] * std::log(p) + (1.0 - y[i]) * std::log(1.0 - p);
      const bool inside = s[i] > kScoreClip && s[i] < 1.0 - kScoreClip;
      g[i] = inside ? (p - y[i]) / (p * (1.0 - p) * count) : 0.0;
    }
    out.loss = total / count;
    return out;
  }

  double total = 0.0;
  for (std::size_t r = 0; r < scores.rows(); ++r) {
    const auto s = scores.row(r);
    const auto y = labels.row(r);
    const double positives = std::accumulate(y.begin(), y.end(), 0.0);
    if (positives <= 0.0) fail(ErrorCode::EmptyLabelRow, "row " + std::to_string(r));
    auto g = out.grad.row(r);
    for (std::size_t c = 0; c < s.size(); ++c) {
      if (y[c] == 0.0) continue;
      const double target = y[c] / positives;
      const double p = std::clamp(s[c], kScoreClip, 1.0 - kScoreClip);
      total -= target * std::log(p);
      const bool inside = s[c] > kScoreClip && s[c] < 1.0 - kScoreClip;
      g[c] = inside ? -target / (p * batch) : 0.0;
    }
  }
  out.loss = total / batch;
  return out;
}

LossKind default_loss(const ModelGraph& graph) {
  const Node& out = graph.nodes().back();
  return out.kind == NodeKind::softmax && out.group == 0 ? LossKind::softmax_ce
                                                         : LossKind::sigmoid_ce;
}

namespace {

Tensor2 gather_features(const std::vector<const Example*>& pool,
                        std::span<const std::size_t> idx, std::size_t dim) {
  Tensor2 out(idx.size(), dim);
  for (std::size_t r = 0; r < idx.size(); ++r) pool[idx[r]]->features.concat_into(out.row(r));
  return out;
}

Tensor2 gather_labels(const std::vector<const Example*>& pool, std::span<const std::size_t> idx,
                      std::size_t classes) {
  Tensor2 out(idx.size(), classes);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    for (ClassIndex l : pool[idx[r]]->labels) out(r, static_cast<std::size_t>(l)) = 1.0;
  }
  return out;
}

void shuffle(std::vector<std::size_t>& order, std::uint64_t seed) {
  Rng rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
}

}  // namespace

TrainReport train(ModelGraph& graph, const Dataset& data, const Dataset* validation,
                  const TrainConfig& cfg) {
  if (data.empty()) fail(ErrorCode::InvalidConfig, "training set is empty");
  if (cfg.eval_every == 0) fail(ErrorCode::InvalidConfig, "eval_every must be at least 1");
  if (cfg.k == 0) fail(ErrorCode::InvalidConfig, "k must be at least 1");
  cfg.optimizer.validate();
  if (graph.input_dim() != data.schema.feature_dim() ||
      graph.output_dim() != data.schema.num_classes) {
    fail(ErrorCode::ShapeMismatch, "graph " + std::to_string(graph.input_dim()) + "->" +
                                       std::to_string(graph.output_dim()) + " for data " +
                                       std::to_string(data.schema.feature_dim()) + "->" +
                                       std::to_string(data.schema.num_classes));
  }

  std::vector<const Example*> pool;
  pool.reserve(data.size() + (validation ? validation->size() : 0));
  for (const auto& ex : data.examples) pool.push_back(&ex);
  if (cfg.include_validation && validation) {
    if (!(validation->schema == data.schema)) {
      fail(ErrorCode::ShapeMismatch, "validation set has a different schema");
    }
    for (const auto& ex : validation->examples) pool.push_back(&ex);
  }

  const LossKind loss_kind = cfg.loss.value_or(default_loss(graph));
  const std::size_t dim = data.schema.feature_dim();
  const std::size_t classes = data.schema.num_classes;

  // Held out when a validation set is given and not trained on; otherwise the
  // leading slice of the training pool.
  Dataset monitor{data.schema, {}};
  const bool held_out = validation && !validation->empty() && !cfg.include_validation;
  if (held_out) {
    const std::size_t n = std::min(cfg.monitor_size, validation->size());
    monitor.examples.assign(validation->examples.begin(),
                            validation->examples.begin() + static_cast<std::ptrdiff_t>(n));
  } else {
    const std::size_t n = std::min(cfg.monitor_size, pool.size());
    monitor.examples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) monitor.examples.push_back(*pool[i]);
  }

  Optimizer optimizer(cfg.optimizer);
  TrainReport report;
  std::vector<std::size_t> order(pool.size());
  std::size_t cursor = order.size();  // forces a shuffle on the first step
  std::uint64_t epoch = 0;
  Workspace ws;

  for (std::size_t step = 1; step <= cfg.optimizer.max_steps; ++step) {
    if (cursor >= order.size()) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      shuffle(order, derive_seed(cfg.shuffle_seed, epoch++));
      cursor = 0;
    }
    const std::size_t take = std::min(cfg.optimizer.batch_size, order.size() - cursor);
    const std::span<const std::size_t> idx(order.data() + cursor, take);
    cursor += take;

    const Tensor2 x = gather_features(pool, idx, dim);
    const Tensor2 y = gather_labels(pool, idx, classes);
    Tensor2 scores;
    try {
      scores = graph.forward(x, Mode::train, ws);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NonFiniteValue) throw TrainingAborted(step, report);
      throw;
    }
    LossResult lr = loss_and_grad(scores, y, loss_kind);
    const double loss = lr.loss + graph.regularization_loss();
    if (!std::isfinite(loss)) throw TrainingAborted(step, report);
    report.loss_curve.emplace_back(step, loss);

    const Gradients grads = graph.backward(ws, lr.grad);
    optimizer.step(graph, grads);
    graph.advance_mask_step();
    if (cfg.float32_params) graph.round_params_to_float32();
    report.steps_run = step;

    if (step % cfg.eval_every == 0 || step == cfg.optimizer.max_steps) {
      report.train_gap_curve.emplace_back(step, evaluate(graph, monitor, cfg.k).gap);
    }
  }

  if (cfg.checkpoint_path) save_checkpoint(*cfg.checkpoint_path, graph);
  return report;
}

Tensor2 predict(const ModelGraph& graph, const Dataset& data, std::size_t batch_size) {
  Tensor2 out(data.size(), graph.output_dim());
  Workspace ws;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < data.size(); start += batch_size) {
    const std::size_t end = std::min(data.size(), start + batch_size);
    idx.resize(end - start);
    std::iota(idx.begin(), idx.end(), start);
    const Tensor2 scores = graph.forward(feature_batch(data, idx), Mode::infer, ws);
    std::copy(scores.values().begin(), scores.values().end(),
              out.values().begin() + static_cast<std::ptrdiff_t>(start * out.cols()));
  }
  return out;
}

std::vector<PredictionList> top_k_lists(const Tensor2& scores, const Dataset& data, std::size_t k) {
  if (scores.rows() != data.size()) fail(ErrorCode::ShapeMismatch, "one score row per example");
  std::vector<PredictionList> lists;
  lists.reserve(data.size());
  for (std::size_t r = 0; r < data.size(); ++r) {
    lists.emplace_back(data.examples[r].video_id, top_k(scores.row(r), k), k);
  }
  return lists;
}

std::vector<PredictionList> predict_top_k(const ModelGraph& graph, const Dataset& data,
                                          std::size_t k) {
  return top_k_lists(predict(graph, data), data, k);
}

GapReport evaluate(const ModelGraph& graph, const Dataset& data, std::size_t k) {
  const auto truth = ground_truth(data);
  const auto lists = predict_top_k(graph, data, k);
  return gap_at_k(lists, truth, k);
}

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string report_csv(const TrainReport& report) {
  std::string out = "step,loss,gap\n";
  std::size_t g = 0;
  for (const auto& [step, loss] : report.loss_curve) {
    out += std::to_string(step) + "," + format_real(loss) + ",";
    if (g < report.train_gap_curve.size() && report.train_gap_curve[g].first == step) {
      out += format_real(report.train_gap_curve[g++].second);
    }
    out += "\n";
  }
  return out;
}

void write_report_csv(const std::filesystem::path& path, const TrainReport& report) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  const std::string csv = report_csv(report);
  out.write(csv.data(), static_cast<std::streamsize>(csv.size()));
  if (!out) fail(ErrorCode::Io, "write failed on " + path.string());
}

}  // namespace yt8m
