#pragma once

// Architecture configurations used by the gradient and equivalence checks:
// input width 12, 5 classes, batch 4. The deep residual and wide dropout nets
// are scaled down; everything else uses its default widths.

#include <string>
#include <vector>

#include "yt8m/modelzoo.hpp"

namespace yt8m::zoo {

inline constexpr std::size_t kGradInputDim = 12;
inline constexpr std::size_t kGradClasses = 5;
inline constexpr std::size_t kGradBatch = 4;

struct ZooCase {
  std::string label;
  ArchitectureSpec spec;
  bool has_dropout = false;
};

inline std::vector<ZooCase> gradient_cases() {
  std::vector<ZooCase> cases;
  auto add = [&](std::string label, ArchitectureSpec spec, bool dropout = false) {
    cases.push_back({std::move(label), std::move(spec), dropout});
  };
  add("logreg", {.arch = Architecture::logreg});
  for (std::size_t m : {1, 2, 7}) {
    add("moe M=" + std::to_string(m), {.arch = Architecture::moe, .num_mixtures = m});
  }
  add("moe_c", {.arch = Architecture::moe_c, .num_mixtures = 2});
  add("mlp2000", {.arch = Architecture::mlp2000});
  add("mlp3000", {.arch = Architecture::mlp3000});
  add("mlp512_256", {.arch = Architecture::mlp512_256});
  add("mlp_res5", {.arch = Architecture::mlp_res5});
  add("mlp_a scaled", {.arch = Architecture::mlp_a,
                       .hidden_sizes = {24, 16, 16, 16, 16, 16, 16, 16, 16}});
  add("mlp_e scaled", {.arch = Architecture::mlp_e, .hidden_sizes = {32, 24, 24}}, true);
  add("ae_clf", {.arch = Architecture::ae_clf});
  add("cnn1", {.arch = Architecture::cnn1}, true);
  add("mlp2048_dropout", {.arch = Architecture::mlp2048_dropout}, true);
  return cases;
}

}  // namespace yt8m::zoo
