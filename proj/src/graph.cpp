#include "yt8m/graph.hpp"

#include <algorithm>
#include <cmath>

#include "yt8m/error.hpp"
#include "yt8m/kernels.hpp"
#include "yt8m/rng.hpp"

namespace yt8m {

std::string_view node_kind_name(NodeKind kind) {
  switch (kind) {
    case NodeKind::input: return "input";
    case NodeKind::dense: return "dense";
    case NodeKind::projection: return "projection";
    case NodeKind::relu: return "relu";
    case NodeKind::sigmoid: return "sigmoid";
    case NodeKind::softmax: return "softmax";
    case NodeKind::dropout: return "dropout";
    case NodeKind::add: return "add";
    case NodeKind::concat: return "concat";
    case NodeKind::conv1x1: return "conv1x1";
    case NodeKind::maxpool1: return "maxpool1";
    case NodeKind::flatten: return "flatten";
    case NodeKind::mixture: return "mixture";
  }
  return "unknown";
}

namespace {

std::string shape_str(const Tensor2& t) {
  return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

double sigmoid_of(double x) noexcept {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void add_bias(Tensor2& y, const Tensor2& bias) {
  const double* b = bias.data();
  for (std::size_t r = 0; r < y.rows(); ++r) {
    auto row = y.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += b[j];
  }
}

void column_sums_into(const Tensor2& g, Tensor2& out) {
  double* o = out.data();
  for (std::size_t r = 0; r < g.rows(); ++r) {
    const auto row = g.row(r);
    for (std::size_t j = 0; j < row.size(); ++j) o[j] += row[j];
  }
}

void accumulate(Tensor2& dst, const Tensor2& src) {
  auto d = dst.values();
  const auto s = src.values();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

}  // namespace

ModelGraph::ModelGraph(std::size_t input_dim, std::uint64_t seed) : seed_(seed) {
  Node in;
  in.kind = NodeKind::input;
  in.name = "input";
  in.out_dim = input_dim;
  in.trainable = false;
  nodes_.push_back(std::move(in));
}

void ModelGraph::check_input(std::size_t id) const {
  if (id >= nodes_.size()) {
    fail(ErrorCode::BadSpec, "node input " + std::to_string(id) + " does not exist yet");
  }
}

std::size_t ModelGraph::push(Node node) {
  if (node.name.empty()) fail(ErrorCode::BadSpec, "node without a name");
  if (has_node(node.name)) fail(ErrorCode::BadSpec, "duplicate node name " + node.name);
  for (std::size_t in : node.inputs) check_input(in);
  nodes_.push_back(std::move(node));
  workspace_.valid = false;
  return nodes_.size() - 1;
}

std::size_t ModelGraph::append(Node node) {
  if (node.kind == NodeKind::input) fail(ErrorCode::BadSpec, "a graph has exactly one input node");
  if (node.inputs.empty()) fail(ErrorCode::BadSpec, node.name + " has no inputs");
  for (std::size_t in : node.inputs) check_input(in);
  const std::size_t in_dim = nodes_[node.inputs.front()].out_dim;
  auto expect = [&](bool ok) {
    if (!ok) fail(ErrorCode::BadSpec, "inconsistent " + std::string(node_kind_name(node.kind)) +
                                          " node " + node.name);
  };
  switch (node.kind) {
    case NodeKind::dense:
      expect(node.params.size() == 2 && node.params[0].rows() == in_dim &&
             node.params[0].cols() == node.out_dim && node.params[1].size() == node.out_dim);
      break;
    case NodeKind::projection:
      expect(node.params.size() == 1 && node.params[0].rows() == in_dim &&
             node.params[0].cols() == node.out_dim);
      break;
    case NodeKind::conv1x1:
      expect(node.params.size() == 2 && node.group > 0 && node.params[0].size() == node.group &&
             node.params[1].size() == node.group && node.out_dim == in_dim * node.group);
      break;
    case NodeKind::softmax:
      expect(node.params.empty() && node.out_dim == in_dim &&
             (node.group == 0 || in_dim % node.group == 0));
      break;
    case NodeKind::dropout:
      expect(node.params.empty() && node.out_dim == in_dim && node.keep_prob > 0.0 &&
             node.keep_prob <= 1.0);
      break;
    case NodeKind::add:
      for (std::size_t in : node.inputs) expect(nodes_[in].out_dim == node.out_dim);
      expect(node.params.empty());
      break;
    case NodeKind::concat: {
      std::size_t total = 0;
      for (std::size_t in : node.inputs) total += nodes_[in].out_dim;
      expect(node.params.empty() && total == node.out_dim);
      break;
    }
    case NodeKind::mixture:
      expect(node.inputs.size() == 2 && node.params.empty() && node.classes > 0 &&
             node.group > 0 && node.out_dim == node.classes &&
             in_dim == node.classes * (node.group + 1) &&
             nodes_[node.inputs[1]].out_dim == node.classes * node.group);
      break;
    default:
      expect(node.params.empty() && node.out_dim == in_dim && node.inputs.size() == 1);
      break;
  }
  return push(std::move(node));
}

std::size_t ModelGraph::dense(std::size_t from, std::size_t out_dim, std::string name, InitKind init) {
  check_input(from);
  Node n;
  n.kind = NodeKind::dense;
  n.name = std::move(name);
  n.inputs = {from};
  n.out_dim = out_dim;
  n.init = init;
  n.params = {Tensor2(nodes_[from].out_dim, out_dim), Tensor2(1, out_dim)};
  return push(std::move(n));
}

std::size_t ModelGraph::projection(std::size_t from, std::size_t out_dim, std::string name,
                                   InitKind init) {
  check_input(from);
  Node n;
  n.kind = NodeKind::projection;
  n.name = std::move(name);
  n.inputs = {from};
  n.out_dim = out_dim;
  n.init = init;
  n.params = {Tensor2(nodes_[from].out_dim, out_dim)};
  return push(std::move(n));
}

namespace {
Node unary(NodeKind kind, std::size_t from, std::size_t dim, std::string name) {
  Node n;
  n.kind = kind;
  n.name = std::move(name);
  n.inputs = {from};
  n.out_dim = dim;
  return n;
}
}  // namespace

std::size_t ModelGraph::relu(std::size_t from, std::string name) {
  check_input(from);
  return push(unary(NodeKind::relu, from, nodes_[from].out_dim, std::move(name)));
}

std::size_t ModelGraph::sigmoid(std::size_t from, std::string name) {
  check_input(from);
  return push(unary(NodeKind::sigmoid, from, nodes_[from].out_dim, std::move(name)));
}

std::size_t ModelGraph::softmax(std::size_t from, std::string name, std::size_t group) {
  check_input(from);
  const std::size_t dim = nodes_[from].out_dim;
  if (group != 0 && dim % group != 0) {
    fail(ErrorCode::BadSpec, "softmax group " + std::to_string(group) + " does not divide " +
                                 std::to_string(dim));
  }
  Node n = unary(NodeKind::softmax, from, dim, std::move(name));
  n.group = group;
  return push(std::move(n));
}

std::size_t ModelGraph::dropout(std::size_t from, double keep_prob, std::string name) {
  check_input(from);
  if (!(keep_prob > 0.0 && keep_prob <= 1.0)) {
    fail(ErrorCode::BadSpec, "keep_prob " + std::to_string(keep_prob) + " outside (0,1]");
  }
  Node n = unary(NodeKind::dropout, from, nodes_[from].out_dim, std::move(name));
  n.keep_prob = keep_prob;
  return push(std::move(n));
}

std::size_t ModelGraph::add(std::vector<std::size_t> from, std::string name, double scale,
                            std::size_t divisor) {
  if (from.empty()) fail(ErrorCode::BadSpec, "add without operands");
  for (std::size_t id : from) check_input(id);
  const std::size_t dim = nodes_[from.front()].out_dim;
  for (std::size_t id : from) {
    if (nodes_[id].out_dim != dim) {
      fail(ErrorCode::ShapeMismatch, "add operands of width " + std::to_string(dim) + " and " +
                                         std::to_string(nodes_[id].out_dim));
    }
  }
  Node n;
  n.kind = NodeKind::add;
  n.name = std::move(name);
  n.inputs = std::move(from);
  n.out_dim = dim;
  n.scale = scale;
  n.group = divisor;
  return push(std::move(n));
}

std::size_t ModelGraph::concat(std::vector<std::size_t> from, std::string name) {
  if (from.empty()) fail(ErrorCode::BadSpec, "concat without operands");
  std::size_t dim = 0;
  for (std::size_t id : from) {
    check_input(id);
    dim += nodes_[id].out_dim;
  }
  Node n;
  n.kind = NodeKind::concat;
  n.name = std::move(name);
  n.inputs = std::move(from);
  n.out_dim = dim;
  return push(std::move(n));
}

std::size_t ModelGraph::conv1x1(std::size_t from, std::size_t channels, std::string name) {
  check_input(from);
  if (channels == 0) fail(ErrorCode::BadSpec, "conv1x1 with zero channels");
  Node n = unary(NodeKind::conv1x1, from, nodes_[from].out_dim * channels, std::move(name));
  n.group = channels;
  n.params = {Tensor2(1, channels), Tensor2(1, channels)};
  return push(std::move(n));
}

std::size_t ModelGraph::maxpool1(std::size_t from, std::string name) {
  check_input(from);
  return push(unary(NodeKind::maxpool1, from, nodes_[from].out_dim, std::move(name)));
}

std::size_t ModelGraph::flatten(std::size_t from, std::string name) {
  check_input(from);
  return push(unary(NodeKind::flatten, from, nodes_[from].out_dim, std::move(name)));
}

std::size_t ModelGraph::mixture(std::size_t gates, std::size_t experts, std::size_t classes,
                                std::size_t mixtures, std::string name) {
  check_input(gates);
  check_input(experts);
  if (classes == 0 || mixtures == 0) fail(ErrorCode::BadSpec, "mixture needs classes and experts");
  if (nodes_[gates].out_dim != classes * (mixtures + 1) ||
      nodes_[experts].out_dim != classes * mixtures) {
    fail(ErrorCode::ShapeMismatch, "mixture of " + std::to_string(classes) + "x" +
                                       std::to_string(mixtures) + " got gates " +
                                       std::to_string(nodes_[gates].out_dim) + ", experts " +
                                       std::to_string(nodes_[experts].out_dim));
  }
  Node n;
  n.kind = NodeKind::mixture;
  n.name = std::move(name);
  n.inputs = {gates, experts};
  n.out_dim = classes;
  n.classes = classes;
  n.group = mixtures;
  return push(std::move(n));
}

const Node& ModelGraph::node(std::string_view name) const {
  for (const auto& n : nodes_) {
    if (n.name == name) return n;
  }
  fail(ErrorCode::BadSpec, "no node named " + std::string(name));
}

Node& ModelGraph::node(std::string_view name) {
  return const_cast<Node&>(static_cast<const ModelGraph&>(*this).node(name));
}

bool ModelGraph::has_node(std::string_view name) const noexcept {
  return std::any_of(nodes_.begin(), nodes_.end(), [&](const Node& n) { return n.name == name; });
}

void ModelGraph::set_reg(RegConfig reg) {
  if (!(reg.penalty >= 0.0) || !std::isfinite(reg.penalty)) {
    fail(ErrorCode::BadSpec, "regularization penalty must be finite and nonnegative");
  }
  reg_ = reg;
}

void ModelGraph::init_params(std::uint64_t seed) {
  seed_ = seed;
  for (auto& n : nodes_) {
    if (!n.has_params()) continue;
    Rng rng(derive_seed(seed, hash_name(n.name)));
    Tensor2& w = n.params[0];
    const double fan_in = n.kind == NodeKind::conv1x1 ? 1.0 : static_cast<double>(w.rows());
    const double fan_out = static_cast<double>(w.cols());
    if (n.init == InitKind::normal_001) {
      for (auto& v : w.values()) v = rng.normal(0.0, 0.01);
    } else if (n.init == InitKind::identity_or_glorot && w.rows() == w.cols()) {
      w.fill(0.0);
      for (std::size_t i = 0; i < w.rows(); ++i) w(i, i) = 1.0;
    } else {
      const double bound = std::sqrt(6.0 / (fan_in + fan_out));
      for (auto& v : w.values()) v = rng.uniform(-bound, bound);
    }
    for (std::size_t p = 1; p < n.params.size(); ++p) n.params[p].fill(0.0);
  }
  workspace_.valid = false;
}

std::size_t ModelGraph::parameter_count() const noexcept {
  std::size_t total = 0;
  for (const auto& n : nodes_) {
    for (const auto& p : n.params) total += p.size();
  }
  return total;
}

void ModelGraph::set_trainable(bool trainable) {
  for (auto& n : nodes_) {
    if (n.kind != NodeKind::input) n.trainable = trainable;
  }
}

void ModelGraph::round_params_to_float32() {
  for (auto& n : nodes_) {
    for (auto& p : n.params) {
      for (auto& v : p.values()) v = static_cast<double>(static_cast<float>(v));
    }
  }
}

Tensor2 ModelGraph::forward(const Tensor2& batch, Mode mode) {
  return forward(batch, mode, workspace_);
}

Tensor2 ModelGraph::forward(const Tensor2& batch, Mode mode, Workspace& ws) const {
  if (batch.cols() != input_dim()) {
    fail(ErrorCode::ShapeMismatch, "batch of width " + std::to_string(batch.cols()) +
                                       " into a graph of input width " +
                                       std::to_string(input_dim()));
  }
  const std::size_t rows = batch.rows();
  ws.valid = false;
  ws.mode = mode;
  ws.activations.assign(nodes_.size(), Tensor2());
  ws.masks.assign(nodes_.size(), Tensor2());
  ws.activations[0] = batch;
  if (!batch.all_finite()) fail(ErrorCode::NonFiniteValue, "input");

  for (std::size_t id = 1; id < nodes_.size(); ++id) {
    const Node& n = nodes_[id];
    const Tensor2& x = ws.activations[n.inputs.front()];
    Tensor2 y(rows, n.out_dim);
    switch (n.kind) {
      case NodeKind::input:
        break;
      case NodeKind::dense:
        kernels::gemm_nn(x, n.params[0], y);
        add_bias(y, n.params[1]);
        break;
      case NodeKind::projection:
        kernels::gemm_nn(x, n.params[0], y);
        break;
      case NodeKind::relu: {
        const auto in = x.values();
        auto out = y.values();
        for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
        break;
      }
      case NodeKind::sigmoid: {
        const auto in = x.values();
        auto out = y.values();
        for (std::size_t i = 0; i < in.size(); ++i) out[i] = sigmoid_of(in[i]);
        break;
      }
      case NodeKind::softmax: {
        const std::size_t g = n.group == 0 ? n.out_dim : n.group;
        for (std::size_t r = 0; r < rows; ++r) {
          const auto in = x.row(r);
          auto out = y.row(r);
          for (std::size_t start = 0; start < n.out_dim; start += g) {
            const double mx = *std::max_element(in.begin() + start, in.begin() + start + g);
            double total = 0.0;
            for (std::size_t j = start; j < start + g; ++j) {
              out[j] = std::exp(in[j] - mx);
              total += out[j];
            }
            for (std::size_t j = start; j < start + g; ++j) out[j] /= total;
          }
        }
        break;
      }
      case NodeKind::dropout: {
        if (mode == Mode::infer || n.keep_prob == 1.0) {
          y = x;
          break;
        }
        Tensor2 mask(rows, n.out_dim);
        Rng rng(derive_seed(derive_seed(seed_, hash_name(n.name)), mask_step_));
        const double kept = 1.0 / n.keep_prob;
        for (auto& m : mask.values()) m = rng.bernoulli(n.keep_prob) ? kept : 0.0;
        const auto in = x.values();
        const auto mv = mask.values();
        auto out = y.values();
        for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] * mv[i];
        ws.masks[id] = std::move(mask);
        break;
      }
      case NodeKind::add: {
        y = x;
        auto out = y.values();
        if (n.group > 0) {
          // Mean: exact long double sum and quotient, rounded once, so n
          // identical operands reproduce the operand.
          const auto divisor = static_cast<long double>(n.group);
          for (std::size_t i = 0; i < out.size(); ++i) {
            long double acc = 0.0L;
            for (std::size_t in : n.inputs) acc += ws.activations[in].values()[i];
            out[i] = static_cast<double>(acc / divisor * static_cast<long double>(n.scale));
          }
          break;
        }
        for (std::size_t k = 1; k < n.inputs.size(); ++k) {
          const auto in = ws.activations[n.inputs[k]].values();
          for (std::size_t i = 0; i < out.size(); ++i) out[i] += in[i];
        }
        if (n.scale != 1.0) {
          for (auto& v : out) v *= n.scale;
        }
        break;
      }
      case NodeKind::concat: {
        for (std::size_t r = 0; r < rows; ++r) {
          auto out = y.row(r);
          std::size_t offset = 0;
          for (std::size_t in_id : n.inputs) {
            const auto in = ws.activations[in_id].row(r);
            std::copy(in.begin(), in.end(), out.begin() + static_cast<std::ptrdiff_t>(offset));
            offset += in.size();
          }
        }
        break;
      }
      case NodeKind::conv1x1: {
        const std::size_t ch = n.group;
        const double* w = n.params[0].data();
        const double* b = n.params[1].data();
        for (std::size_t r = 0; r < rows; ++r) {
          const auto in = x.row(r);
          auto out = y.row(r);
          for (std::size_t f = 0; f < in.size(); ++f) {
            for (std::size_t c = 0; c < ch; ++c) out[f * ch + c] = in[f] * w[c] + b[c];
          }
        }
        break;
      }
      case NodeKind::maxpool1:
      case NodeKind::flatten:
        y = x;
        break;
      case NodeKind::mixture: {
        const Tensor2& experts = ws.activations[n.inputs[1]];
        const std::size_t m = n.group;
        for (std::size_t r = 0; r < rows; ++r) {
          const auto g = x.row(r);
          const auto e = experts.row(r);
          auto out = y.row(r);
          for (std::size_t c = 0; c < n.classes; ++c) {
            double s = 0.0;
            for (std::size_t k = 0; k < m; ++k) s += g[c * (m + 1) + k] * e[c * m + k];
            out[c] = s;
          }
        }
        break;
      }
    }
    if (!y.all_finite()) fail(ErrorCode::NonFiniteValue, n.name);
    ws.activations[id] = std::move(y);
  }
  ws.valid = true;
  return ws.activations.back();
}

Gradients ModelGraph::backward(const Tensor2& grad_out) const {
  return backward(workspace_, grad_out);
}

Gradients ModelGraph::backward(const Workspace& ws, const Tensor2& grad_out) const {
  if (!ws.valid || ws.activations.size() != nodes_.size()) {
    fail(ErrorCode::NoCachedForward, "backward called without a matching forward pass");
  }
  const Tensor2& out = ws.activations.back();
  if (!grad_out.same_shape(out)) {
    fail(ErrorCode::ShapeMismatch, "grad_out " + shape_str(grad_out) + " for output " +
                                       shape_str(out));
  }
  const std::size_t rows = out.rows();

  Gradients grads(nodes_.size());
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    const Node& n = nodes_[id];
    if (!n.trainable) continue;
    for (const auto& p : n.params) grads[id].emplace_back(p.rows(), p.cols());
  }

  std::vector<Tensor2> dact(nodes_.size());
  dact.back() = grad_out;
  auto upstream = [&](std::size_t in_id) -> Tensor2* {
    if (in_id == 0) return nullptr;  // the input needs no gradient
    if (dact[in_id].empty()) dact[in_id] = Tensor2(rows, nodes_[in_id].out_dim);
    return &dact[in_id];
  };

  for (std::size_t id = nodes_.size() - 1; id >= 1; --id) {
    const Node& n = nodes_[id];
    if (dact[id].empty()) continue;  // not on a path to the output
    const Tensor2& dy = dact[id];
    const Tensor2& y = ws.activations[id];
    const std::size_t in0 = n.inputs.front();
    const Tensor2& x = ws.activations[in0];
    Tensor2* dx = upstream(in0);

    switch (n.kind) {
      case NodeKind::input:
        break;
      case NodeKind::dense:
      case NodeKind::projection: {
        if (n.trainable) {
          kernels::gemm_tn(x, dy, grads[id][0]);
          if (n.kind == NodeKind::dense) column_sums_into(dy, grads[id][1]);
        }
        if (dx) kernels::gemm_nt(dy, n.params[0], *dx);
        break;
      }
      case NodeKind::relu: {
        if (!dx) break;
        const auto yv = y.values();
        const auto g = dy.values();
        auto d = dx->values();
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (yv[i] > 0.0) d[i] += g[i];
        }
        break;
      }
      case NodeKind::sigmoid: {
        if (!dx) break;
        const auto yv = y.values();
        const auto g = dy.values();
        auto d = dx->values();
        for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * yv[i] * (1.0 - yv[i]);
        break;
      }
      case NodeKind::softmax: {
        if (!dx) break;
        const std::size_t grp = n.group == 0 ? n.out_dim : n.group;
        for (std::size_t r = 0; r < rows; ++r) {
          const auto yr = y.row(r);
          const auto gr = dy.row(r);
          auto dr = dx->row(r);
          for (std::size_t start = 0; start < n.out_dim; start += grp) {
            double inner = 0.0;
            for (std::size_t j = start; j < start + grp; ++j) inner += gr[j] * yr[j];
            for (std::size_t j = start; j < start + grp; ++j) dr[j] += yr[j] * (gr[j] - inner);
          }
        }
        break;
      }
      case NodeKind::dropout: {
        if (!dx) break;
        const Tensor2& mask = ws.masks[id];
        if (mask.empty()) {
          accumulate(*dx, dy);
        } else {
          const auto m = mask.values();
          const auto g = dy.values();
          auto d = dx->values();
          for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i] * m[i];
        }
        break;
      }
      case NodeKind::add: {
        for (std::size_t in_id : n.inputs) {
          Tensor2* d = upstream(in_id);
          if (!d) continue;
          const double factor = n.group > 0 ? n.scale / static_cast<double>(n.group) : n.scale;
          if (factor == 1.0) {
            accumulate(*d, dy);
          } else {
            const auto g = dy.values();
            auto dv = d->values();
            for (std::size_t i = 0; i < g.size(); ++i) dv[i] += factor * g[i];
          }
        }
        break;
      }
      case NodeKind::concat: {
        std::size_t offset = 0;
        for (std::size_t in_id : n.inputs) {
          const std::size_t width = nodes_[in_id].out_dim;
          if (Tensor2* d = upstream(in_id)) {
            for (std::size_t r = 0; r < rows; ++r) {
              const auto g = dy.row(r);
              auto dr = d->row(r);
              for (std::size_t j = 0; j < width; ++j) dr[j] += g[offset + j];
            }
          }
          offset += width;
        }
        break;
      }
      case NodeKind::conv1x1: {
        const std::size_t ch = n.group;
        const double* w = n.params[0].data();
        double* dw = n.trainable ? grads[id][0].data() : nullptr;
        double* db = n.trainable ? grads[id][1].data() : nullptr;
        for (std::size_t r = 0; r < rows; ++r) {
          const auto xr = x.row(r);
          const auto g = dy.row(r);
          for (std::size_t f = 0; f < xr.size(); ++f) {
            double dxf = 0.0;
            for (std::size_t c = 0; c < ch; ++c) {
              const double gv = g[f * ch + c];
              if (dw) {
                dw[c] += gv * xr[f];
                db[c] += gv;
              }
              dxf += gv * w[c];
            }
            if (dx) (*dx)(r, f) += dxf;
          }
        }
        break;
      }
      case NodeKind::maxpool1:
      case NodeKind::flatten:
        if (dx) accumulate(*dx, dy);
        break;
      case NodeKind::mixture: {
        const std::size_t m = n.group;
        const Tensor2& experts = ws.activations[n.inputs[1]];
        Tensor2* dexp = upstream(n.inputs[1]);
        for (std::size_t r = 0; r < rows; ++r) {
          const auto g = x.row(r);
          const auto e = experts.row(r);
          const auto gy = dy.row(r);
          for (std::size_t c = 0; c < n.classes; ++c) {
            for (std::size_t k = 0; k < m; ++k) {
              if (dx) (*dx)(r, c * (m + 1) + k) += gy[c] * e[c * m + k];
              if (dexp) (*dexp)(r, c * m + k) += gy[c] * g[c * (m + 1) + k];
            }
          }
        }
        break;
      }
    }
  }

  if (reg_.norm != Norm::none && reg_.penalty != 0.0) {
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
      const Node& n = nodes_[id];
      if (!n.trainable || !n.penalized()) continue;
      const auto w = n.params[0].values();
      auto g = grads[id][0].values();
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (reg_.norm == Norm::l2) {
          g[i] += 2.0 * reg_.penalty * w[i];
        } else {
          g[i] += reg_.penalty * static_cast<double>((w[i] > 0.0) - (w[i] < 0.0));
        }
      }
    }
  }
  return grads;
}

double ModelGraph::regularization_loss() const noexcept {
  if (reg_.norm == Norm::none || reg_.penalty == 0.0) return 0.0;
  double total = 0.0;
  for (const auto& n : nodes_) {
    if (!n.trainable || !n.penalized()) continue;
    for (double w : n.params[0].values()) total += reg_.norm == Norm::l2 ? w * w : std::abs(w);
  }
  return reg_.penalty * total;
}

double max_abs_difference(const Gradients& a, const Gradients& b) {
  if (a.size() != b.size()) fail(ErrorCode::ShapeMismatch, "gradient sets differ in node count");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) fail(ErrorCode::ShapeMismatch, "gradient sets differ");
    for (std::size_t p = 0; p < a[i].size(); ++p) {
      if (!a[i][p].same_shape(b[i][p])) fail(ErrorCode::ShapeMismatch, "gradient shapes differ");
      const auto av = a[i][p].values();
      const auto bv = b[i][p].values();
      for (std::size_t k = 0; k < av.size(); ++k) worst = std::max(worst, std::abs(av[k] - bv[k]));
    }
  }
  return worst;
}

}  // namespace yt8m
