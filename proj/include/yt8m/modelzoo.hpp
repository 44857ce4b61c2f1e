#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "yt8m/graph.hpp"

namespace yt8m {

enum class Architecture : std::uint8_t {
  logreg,           // dense + sigmoid
  moe,              // mixture of experts with an implicit zero expert
  moe_c,            // moe whose experts read a 2048-unit ReLU hidden layer
  mlp2000,          // 2 x 2000 ReLU, softmax
  mlp3000,          // 2 x 3000 ReLU, softmax
  mlp512_256,       // 512, 256 ReLU, sigmoid
  mlp_res5,         // 784,512,512,512,256 with skips (0,3), (2,4)
  mlp_a,            // 1536 + 8 x 1024 with skips (0,3), (2,4), (4,6), (6,8)
  mlp_e,            // 3 x 4096 ReLU + dropout, noisy input projection added to h2, h3
  ae_clf,           // 1152 -> 300 bottleneck, sigmoid head
  cnn1,             // 1x1 conv (32 ch), identity pool, flatten, 6000 ReLU, dropout, softmax
  mlp2048_dropout,  // 2048 ReLU, dropout, sigmoid: the ensemble base learner and stack head
};

enum class OutputActivation : std::uint8_t { sigmoid, softmax };

std::string_view architecture_name(Architecture arch);
/// Errors: UnknownArchitecture(name).
Architecture parse_architecture(std::string_view name);
const std::vector<Architecture>& all_architectures();

struct ArchitectureSpec {
  Architecture arch = Architecture::logreg;
  std::size_t num_mixtures = 2;          // moe family
  std::vector<std::size_t> hidden_sizes; // empty: the architecture's defaults
  double keep_prob = 0.5;                // wherever the architecture has dropout
  std::optional<OutputActivation> output_activation;  // empty: the architecture's default
  std::optional<RegConfig> reg;          // empty: l2 1e-8 for logreg, none otherwise
  bool residual = true;                  // false builds the skip-free twin
  std::size_t conv_channels = 32;        // cnn1

  friend bool operator==(const ArchitectureSpec&, const ArchitectureSpec&) = default;
};

std::vector<std::size_t> default_hidden_sizes(Architecture arch);
OutputActivation default_output_activation(Architecture arch);
RegConfig default_reg(Architecture arch);
/// Skip pairs (a, b): output of layer a (0 = input) feeds hidden layer b's
/// pre-activation through a bias-free projection.
std::vector<std::pair<std::size_t, std::size_t>> skip_pairs(Architecture arch);

/// Errors: BadSpec(detail).
ModelGraph build(const ArchitectureSpec& spec, std::size_t input_dim, std::size_t num_classes,
                 std::uint64_t seed);

/// Default stacking head: 2048 ReLU, dropout 0.5, sigmoid.
ArchitectureSpec default_stack_meta();

}  // namespace yt8m
