#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "yt8m/tensor.hpp"

namespace yt8m {

enum class NodeKind : std::uint8_t {
  input,
  dense,       // x W + b
  projection,  // x W, no bias (skip projections, MLP E's noisy input copy)
  relu,
  sigmoid,
  softmax,     // over consecutive column groups of `group` (0 = whole row)
  dropout,     // inverted dropout with keep_prob
  add,         // scale * sum(inputs) / group (group 0: no division); residual adds use scale 1
  concat,
  conv1x1,     // (B, F) seen as (B, F, 1) -> (B, F * channels)
  maxpool1,    // kernel 1 stride 1: identity
  flatten,     // identity on the row-major layout
  mixture,     // per-class sum_m gate * expert, implicit zero expert last
};

std::string_view node_kind_name(NodeKind kind);

enum class InitKind : std::uint8_t {
  glorot_uniform,     // U(+-sqrt(6 / (fan_in + fan_out)))
  normal_001,         // N(0, 0.01^2)
  identity_or_glorot  // identity when square, glorot otherwise
};

enum class Mode : std::uint8_t { train, infer };

enum class Norm : std::uint8_t { none, l1, l2 };

/// Weight penalty on dense and projection weight matrices; biases are never
/// penalized. l2 adds penalty * sum(w^2), l1 adds penalty * sum(|w|).
struct RegConfig {
  Norm norm = Norm::none;
  double penalty = 0.0;

  friend bool operator==(const RegConfig&, const RegConfig&) = default;
};

struct Node {
  NodeKind kind = NodeKind::input;
  std::string name;
  std::vector<std::size_t> inputs;
  std::size_t out_dim = 0;

  double keep_prob = 1.0;  // dropout
  double scale = 1.0;      // add
  std::size_t group = 0;   // softmax group, mixture count, conv channels, add divisor
  std::size_t classes = 0; // mixture
  InitKind init = InitKind::glorot_uniform;
  bool trainable = true;

  // dense: {W (in x out), b (1 x out)}; projection: {W}; conv1x1: {W (1 x ch), b (1 x ch)}
  std::vector<Tensor2> params;

  bool has_params() const noexcept { return !params.empty(); }
  bool penalized() const noexcept {
    return kind == NodeKind::dense || kind == NodeKind::projection;
  }
};

/// Parameter gradients, indexed like ModelGraph::nodes()[i].params. Frozen
/// and parameterless nodes have an empty entry.
using Gradients = std::vector<std::vector<Tensor2>>;

/// Cached activations and dropout masks of one forward pass. Each concurrent
/// caller of ModelGraph::forward owns its own workspace.
struct Workspace {
  std::vector<Tensor2> activations;
  std::vector<Tensor2> masks;
  Mode mode = Mode::infer;
  bool valid = false;
};

/// A topologically ordered computation graph. Node 0 is the input and the
/// last node is the output; every node reads only earlier nodes.
class ModelGraph {
 public:
  explicit ModelGraph(std::size_t input_dim, std::uint64_t seed = 0);

  // Builders return the new node's id.
  std::size_t dense(std::size_t from, std::size_t out_dim, std::string name,
                    InitKind init = InitKind::glorot_uniform);
  std::size_t projection(std::size_t from, std::size_t out_dim, std::string name, InitKind init);
  std::size_t relu(std::size_t from, std::string name);
  std::size_t sigmoid(std::size_t from, std::string name);
  std::size_t softmax(std::size_t from, std::string name, std::size_t group = 0);
  std::size_t dropout(std::size_t from, double keep_prob, std::string name);
  /// With a divisor the sum is taken in long double and divided before the
  /// single rounding, so averaging identical operands is exact.
  std::size_t add(std::vector<std::size_t> from, std::string name, double scale = 1.0,
                  std::size_t divisor = 0);
  std::size_t concat(std::vector<std::size_t> from, std::string name);
  std::size_t conv1x1(std::size_t from, std::size_t channels, std::string name);
  std::size_t maxpool1(std::size_t from, std::string name);
  std::size_t flatten(std::size_t from, std::string name);
  std::size_t mixture(std::size_t gates, std::size_t experts, std::size_t classes,
                      std::size_t mixtures, std::string name);

  /// Appends a node verbatim (used by graph composition and checkpoints).
  std::size_t append(Node node);

  std::size_t input_dim() const noexcept { return nodes_.front().out_dim; }
  std::size_t output_dim() const noexcept { return nodes_.back().out_dim; }
  std::size_t output_id() const noexcept { return nodes_.size() - 1; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  std::vector<Node>& nodes() noexcept { return nodes_; }
  const Node& node(std::string_view name) const;
  Node& node(std::string_view name);
  bool has_node(std::string_view name) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  void set_seed(std::uint64_t seed) noexcept { seed_ = seed; }

  /// Dropout masks are a pure function of (seed, node name, mask_step). The
  /// trainer advances the step once per update.
  std::uint64_t mask_step() const noexcept { return mask_step_; }
  void set_mask_step(std::uint64_t step) noexcept { mask_step_ = step; }
  void advance_mask_step() noexcept { ++mask_step_; }

  const RegConfig& reg() const noexcept { return reg_; }
  void set_reg(RegConfig reg);

  /// Draws every parameter from a stream keyed by (seed, node name): dense
  /// weights glorot-uniform, normal_001 nodes N(0, 0.01^2), biases zero.
  void init_params(std::uint64_t seed);

  std::size_t parameter_count() const noexcept;
  void set_trainable(bool trainable);
  /// Rounds every parameter to the nearest float and back.
  void round_params_to_float32();

  /// Errors: ShapeMismatch, NonFiniteValue(node name).
  Tensor2 forward(const Tensor2& batch, Mode mode, Workspace& ws) const;
  Tensor2 forward(const Tensor2& batch, Mode mode);

  /// Gradients of sum(grad_out .* output) plus the regularization term.
  /// Errors: NoCachedForward, ShapeMismatch.
  Gradients backward(const Workspace& ws, const Tensor2& grad_out) const;
  Gradients backward(const Tensor2& grad_out) const;

  double regularization_loss() const noexcept;

  const Workspace& workspace() const noexcept { return workspace_; }

 private:
  std::size_t push(Node node);
  void check_input(std::size_t id) const;

  std::vector<Node> nodes_;
  std::uint64_t seed_ = 0;
  std::uint64_t mask_step_ = 0;
  RegConfig reg_;
  Workspace workspace_;
};

/// Max |a - b| over two gradient sets with identical layout.
double max_abs_difference(const Gradients& a, const Gradients& b);

}  // namespace yt8m
