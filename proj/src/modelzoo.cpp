#include "yt8m/modelzoo.hpp"

#include <algorithm>
#include <array>

#include "yt8m/error.hpp"

namespace yt8m {

namespace {

struct ArchInfo {
  Architecture arch;
  std::string_view name;
};

constexpr std::array<ArchInfo, 12> kArchitectures = {{
    {Architecture::logreg, "logreg"},
    {Architecture::moe, "moe"},
    {Architecture::moe_c, "moe_c"},
    {Architecture::mlp2000, "mlp2000"},
    {Architecture::mlp3000, "mlp3000"},
    {Architecture::mlp512_256, "mlp512_256"},
    {Architecture::mlp_res5, "mlp_res5"},
    {Architecture::mlp_a, "mlp_a"},
    {Architecture::mlp_e, "mlp_e"},
    {Architecture::ae_clf, "ae_clf"},
    {Architecture::cnn1, "cnn1"},
    {Architecture::mlp2048_dropout, "mlp2048_dropout"},
}};

std::string layer(std::size_t i) { return "h" + std::to_string(i); }

std::size_t output_head(ModelGraph& g, std::size_t from, std::size_t classes,
                        OutputActivation act) {
  const std::size_t logits = g.dense(from, classes, "out/dense");
  return act == OutputActivation::sigmoid ? g.sigmoid(logits, "out/sigmoid")
                                          : g.softmax(logits, "out/softmax");
}

void require(bool ok, const std::string& detail) {
  if (!ok) fail(ErrorCode::BadSpec, detail);
}

// Plain and residual perceptrons. Hidden layer b's pre-activation is
// dense_b(h_{b-1}) plus one projection per skip (a, b).
std::size_t build_mlp(ModelGraph& g, const std::vector<std::size_t>& hidden,
                      const std::vector<std::pair<std::size_t, std::size_t>>& skips) {
  std::vector<std::size_t> outputs = {0};  // outputs[i] = node id of layer i's output
  for (std::size_t b = 1; b <= hidden.size(); ++b) {
    std::size_t pre = g.dense(outputs[b - 1], hidden[b - 1], layer(b) + "/dense");
    std::vector<std::size_t> terms = {pre};
    for (auto [a, dst] : skips) {
      if (dst != b) continue;
      terms.push_back(g.projection(outputs[a], hidden[b - 1],
                                   "skip" + std::to_string(a) + "_" + std::to_string(b) + "/proj",
                                   InitKind::identity_or_glorot));
    }
    if (terms.size() > 1) pre = g.add(terms, layer(b) + "/add");
    outputs.push_back(g.relu(pre, layer(b) + "/relu"));
  }
  return outputs.back();
}

std::size_t build_moe(ModelGraph& g, std::size_t expert_input, std::size_t classes,
                      std::size_t mixtures) {
  const std::size_t gate_logits = g.dense(0, classes * (mixtures + 1), "gates/dense");
  const std::size_t gates = g.softmax(gate_logits, "gates/softmax", mixtures + 1);
  const std::size_t expert_logits = g.dense(expert_input, classes * mixtures, "experts/dense");
  const std::size_t experts = g.sigmoid(expert_logits, "experts/sigmoid");
  return g.mixture(gates, experts, classes, mixtures, "mixture");
}

}  // namespace

std::string_view architecture_name(Architecture arch) {
  for (const auto& info : kArchitectures) {
    if (info.arch == arch) return info.name;
  }
  return "unknown";
}

Architecture parse_architecture(std::string_view name) {
  for (const auto& info : kArchitectures) {
    if (info.name == name) return info.arch;
  }
  fail(ErrorCode::UnknownArchitecture, std::string(name));
}

const std::vector<Architecture>& all_architectures() {
  static const std::vector<Architecture> all = [] {
    std::vector<Architecture> out;
    for (const auto& info : kArchitectures) out.push_back(info.arch);
    return out;
  }();
  return all;
}

std::vector<std::size_t> default_hidden_sizes(Architecture arch) {
  switch (arch) {
    case Architecture::logreg:
    case Architecture::moe: return {};
    case Architecture::moe_c: return {2048};
    case Architecture::mlp2000: return {2000, 2000};
    case Architecture::mlp3000: return {3000, 3000};
    case Architecture::mlp512_256: return {512, 256};
    case Architecture::mlp_res5: return {784, 512, 512, 512, 256};
    case Architecture::mlp_a: return {1536, 1024, 1024, 1024, 1024, 1024, 1024, 1024, 1024};
    case Architecture::mlp_e: return {4096, 4096, 4096};
    case Architecture::ae_clf: return {1152, 300};
    case Architecture::cnn1: return {6000};
    case Architecture::mlp2048_dropout: return {2048};
  }
  return {};
}

OutputActivation default_output_activation(Architecture arch) {
  switch (arch) {
    case Architecture::mlp2000:
    case Architecture::mlp3000:
    case Architecture::cnn1: return OutputActivation::softmax;
    default: return OutputActivation::sigmoid;
  }
}

RegConfig default_reg(Architecture arch) {
  if (arch == Architecture::logreg) return {Norm::l2, 1e-8};
  return {};
}

std::vector<std::pair<std::size_t, std::size_t>> skip_pairs(Architecture arch) {
  if (arch == Architecture::mlp_res5) return {{0, 3}, {2, 4}};
  if (arch == Architecture::mlp_a) return {{0, 3}, {2, 4}, {4, 6}, {6, 8}};
  return {};
}

ArchitectureSpec default_stack_meta() {
  ArchitectureSpec meta;
  meta.arch = Architecture::mlp2048_dropout;
  meta.keep_prob = 0.5;
  return meta;
}

ModelGraph build(const ArchitectureSpec& spec, std::size_t input_dim, std::size_t num_classes,
                 std::uint64_t seed) {
  const Architecture arch = spec.arch;
  const std::string name(architecture_name(arch));
  require(input_dim > 0, "input_dim must be positive");
  require(num_classes > 0, "num_classes must be positive");
  require(spec.keep_prob > 0.0 && spec.keep_prob <= 1.0, "keep_prob must lie in (0,1]");

  const auto defaults = default_hidden_sizes(arch);
  const auto hidden = spec.hidden_sizes.empty() ? defaults : spec.hidden_sizes;
  require(hidden.size() == defaults.size(),
          name + " takes " + std::to_string(defaults.size()) + " hidden sizes, got " +
              std::to_string(hidden.size()));
  require(std::all_of(hidden.begin(), hidden.end(), [](std::size_t h) { return h > 0; }),
          "hidden sizes must be positive");

  const bool moe_family = arch == Architecture::moe || arch == Architecture::moe_c;
  const OutputActivation act = spec.output_activation.value_or(default_output_activation(arch));
  if (moe_family) {
    require(spec.num_mixtures >= 1, "moe needs at least one mixture");
    require(act == OutputActivation::sigmoid, "moe scores are mixtures of sigmoids");
  }

  ModelGraph g(input_dim, seed);
  switch (arch) {
    case Architecture::logreg:
      output_head(g, 0, num_classes, act);
      break;
    case Architecture::moe:
      build_moe(g, 0, num_classes, spec.num_mixtures);
      break;
    case Architecture::moe_c: {
      const std::size_t h = g.relu(g.dense(0, hidden[0], "hidden/dense"), "hidden/relu");
      build_moe(g, h, num_classes, spec.num_mixtures);
      break;
    }
    case Architecture::mlp2000:
    case Architecture::mlp3000:
    case Architecture::mlp512_256:
    case Architecture::ae_clf:
      output_head(g, build_mlp(g, hidden, {}), num_classes, act);
      break;
    case Architecture::mlp_res5:
    case Architecture::mlp_a: {
      const auto skips = spec.residual ? skip_pairs(arch) : decltype(skip_pairs(arch)){};
      output_head(g, build_mlp(g, hidden, skips), num_classes, act);
      break;
    }
    case Architecture::mlp_e: {
      require(hidden[1] == hidden[2], "mlp_e adds one input projection to h2 and h3, so they "
                                      "must have equal width");
      std::size_t noise = 0;
      if (spec.residual) noise = g.projection(0, hidden[1], "noise/proj", InitKind::normal_001);
      std::size_t prev = 0;
      for (std::size_t b = 1; b <= 3; ++b) {
        std::size_t act_id = g.relu(g.dense(prev, hidden[b - 1], layer(b) + "/dense"),
                                    layer(b) + "/relu");
        if (b >= 2 && spec.residual) act_id = g.add({act_id, noise}, layer(b) + "/add");
        prev = g.dropout(act_id, spec.keep_prob, layer(b) + "/dropout");
      }
      output_head(g, prev, num_classes, act);
      break;
    }
    case Architecture::cnn1: {
      require(spec.conv_channels > 0, "cnn1 needs at least one channel");
      const std::size_t conv = g.conv1x1(0, spec.conv_channels, "conv");
      const std::size_t pool = g.maxpool1(conv, "pool");
      const std::size_t flat = g.flatten(pool, "flatten");
      const std::size_t fc = g.relu(g.dense(flat, hidden[0], "fc/dense"), "fc/relu");
      const std::size_t drop = g.dropout(fc, spec.keep_prob, "fc/dropout");
      output_head(g, drop, num_classes, act);
      break;
    }
    case Architecture::mlp2048_dropout: {
      const std::size_t h = g.relu(g.dense(0, hidden[0], "h1/dense"), "h1/relu");
      output_head(g, g.dropout(h, spec.keep_prob, "h1/dropout"), num_classes, act);
      break;
    }
  }
  g.set_reg(spec.reg.value_or(default_reg(arch)));
  g.init_params(seed);
  return g;
}

}  // namespace yt8m
