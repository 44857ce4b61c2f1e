// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "yt8m/crc32c.hpp"
#include "yt8m/dataset.hpp"
#include "yt8m/ensemble.hpp"
#include "yt8m/error.hpp"
#include "yt8m/metrics.hpp"
#include "yt8m/modelzoo.hpp"
#include "yt8m/rng.hpp"
#include "yt8m/submission.hpp"
#include "yt8m/tfrecord.hpp"
#include "yt8m/training.hpp"
#include "zoo_cases.hpp"

using namespace yt8m;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

void check(Outcome& o, bool ok, const std::string& what) {
  if (!ok) {
    if (o.pass) o.detail = what;
    o.pass = false;
  }
}

fs::path work_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / "yt8m-acceptance";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << s;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

Tensor2 random_batch(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Tensor2 t(rows, cols);
  Rng rng(seed);
  for (auto& v : t.values()) v = rng.normal();
  return t;
}

Tensor2 random_labels(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Tensor2 t(rows, cols);
  Rng rng(seed);
  for (std::size_t r = 0; r < rows; ++r) {
    t(r, rng.below(cols)) = 1.0;
    for (std::size_t c = 0; c < cols; ++c) {
      if (rng.bernoulli(0.25)) t(r, c) = 1.0;
    }
  }
  return t;
}

std::size_t node_index(const ModelGraph& g, const std::string& name) {
  for (std::size_t i = 0; i < g.nodes().size(); ++i) {
    if (g.nodes()[i].name == name) return i;
  }
  fail(ErrorCode::BadSpec, "no node " + name);
}

std::optional<ErrorCode> error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// Runs the tool binary; stdout goes to `log`.
int tool(const std::string& args, const fs::path& log) {
  const std::string cmd =
      std::string("\"") + YT8M_TOOL_PATH + "\" " + args + " >\"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::optional<double> field(const std::string& text, const std::string& key) {
  const auto at = text.find(" " + key + "=");
  if (at == std::string::npos) return std::nullopt;
  return std::stod(text.substr(at + key.size() + 2));
}

// --- 1, 2: GAP ----------------------------------------------------------------

Outcome ac1_metric_oracle() {
  Outcome o;
  Rng rng(20170611);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t k = 1 + rng.below(20);
    const std::size_t videos = 1 + rng.below(50), classes = 1 + rng.below(20);
    GroundTruth truth;
    std::vector<PredictionList> preds;
    for (std::size_t v = 0; v < videos; ++v) {
      const std::string id = "v" + std::to_string(rng.below(10000)) + "_" + std::to_string(v);
      std::vector<ClassIndex> labels;
      std::vector<LabelConfidence> pairs;
      for (std::size_t c = 0; c < classes; ++c) {
        if (rng.bernoulli(0.3)) labels.push_back(static_cast<ClassIndex>(c));
        if (rng.bernoulli(0.6)) {
          const double conf = rng.bernoulli(0.5) ? static_cast<double>(rng.below(11)) / 10.0 : rng.uniform();
          pairs.push_back({static_cast<ClassIndex>(c), conf});
        }
      }
      truth.emplace(id, labels);
      if (rng.bernoulli(0.9)) preds.emplace_back(id, pairs);
    }
    const double got = gap_at_k(preds, truth, k).gap, want = oracle::gap(preds, truth, k);
    worst = std::max(worst, std::abs(got - want));
  }
  check(o, worst <= 1e-12, "max |gap - oracle| = " + fmt(worst));

  GroundTruth truth{{"a", {0, 3}}, {"b", {2}}, {"c", {1}}};
  std::vector<PredictionList> perfect{PredictionList("a", {{0, 0.9}, {3, 0.4}}), PredictionList("b", {{2, 1.0}}),
                                      PredictionList("c", {{1, 0.7}})};
  std::vector<PredictionList> disjoint{PredictionList("a", {{1, 0.9}, {2, 0.8}}), PredictionList("b", {{0, 0.3}}),
                                       PredictionList("c", {{4, 0.2}})};
  check(o, gap_at_k(perfect, truth, 20).gap == 1.0, "perfect != 1");
  check(o, gap_at_k(disjoint, truth, 20).gap == 0.0, "disjoint != 0");
  if (o.pass) o.detail = "1000 instances, max diff " + fmt(worst);
  return o;
}

Outcome ac2_worked_example() {
  Outcome o;
  GroundTruth truth{{"v1", {1}}, {"v2", {1}}};
  std::vector<PredictionList> preds{PredictionList("v1", {{1, 0.9}, {2, 0.8}}), PredictionList("v2", {{1, 0.7}})};
  const double g = gap_at_k(preds, truth, 20).gap;
  check(o, std::abs(g - 5.0 / 6.0) <= 1e-12, "gap = " + fmt(g));
  o.detail = o.pass ? "gap = 5/6" : o.detail;
  return o;
}

// --- 3, 4, 5: model zoo -------------------------------------------------------

Outcome ac3_gradients() {
  Outcome o;
  const auto x = random_batch(zoo::kGradBatch, zoo::kGradInputDim, 11);
  const auto y = random_labels(zoo::kGradBatch, zoo::kGradClasses, 12);
  double worst = 0.0;
  std::size_t checked = 0, kinks = 0;
  for (const auto& c : zoo::gradient_cases()) {
    ModelGraph g = build(c.spec, zoo::kGradInputDim, zoo::kGradClasses, 0);
    const LossKind loss = default_loss(g);
    std::vector<Mode> modes{Mode::infer};
    if (c.has_dropout) modes.push_back(Mode::train);
    for (Mode mode : modes) {
      const auto r = oracle::check_gradients(g, x, y, loss, mode, 24);
      checked += r.checked;
      kinks += r.kinks_skipped;
      worst = std::max(worst, r.max_rel_error);
      check(o, r.max_rel_error <= 1e-4, c.label + ": " + fmt(r.max_rel_error) + " at " + r.worst);
      check(o, r.checked > 0 && r.kinks_skipped * 20 <= r.checked,
            c.label + ": " + std::to_string(r.checked) + " checked, " + std::to_string(r.kinks_skipped) +
                " on ReLU kinks");
    }
  }
  if (o.pass) {
    o.detail = std::to_string(checked) + " entries, max rel error " + fmt(worst) + ", " +
               std::to_string(kinks) + " on ReLU kinks skipped";
  }
  return o;
}

Outcome ac4_moe() {
  Outcome o;
  double worst = 0.0;
  for (std::size_t m : {1, 2, 7}) {
    for (auto arch : {Architecture::moe, Architecture::moe_c}) {
      ModelGraph g = build({.arch = arch, .num_mixtures = m}, 12, 5, 4 + m);
      g.forward(random_batch(16, 12, 2), Mode::infer);
      const Tensor2& gates = g.workspace().activations[node_index(g, "gates/softmax")];
      for (std::size_t r = 0; r < gates.rows(); ++r) {
        for (std::size_t c = 0; c < 5; ++c) {
          double s = 0.0;
          for (std::size_t k = 0; k <= m; ++k) s += gates(r, c * (m + 1) + k);
          worst = std::max(worst, std::abs(s - 1.0));
        }
      }
    }
  }
  check(o, worst <= 1e-9, "gate sum off by " + fmt(worst));
  ModelGraph g = build({.arch = Architecture::moe, .num_mixtures = 1}, 12, 5, 0);
  for (auto& n : g.nodes()) {
    for (auto& p : n.params) p.fill(0.0);
  }
  const Tensor2 out = g.forward(random_batch(8, 12, 9), Mode::infer);
  check(o, std::all_of(out.values().begin(), out.values().end(), [](double v) { return v == 0.25; }),
        "zero-parameter moe(M=1) is not 0.25");
  if (o.pass) o.detail = "max |sum - 1| " + fmt(worst) + ", zero moe = 0.25";
  return o;
}

Outcome ac5_residual() {
  Outcome o;
  const std::size_t in = kDefaultRgbDim + kDefaultAudioDim, classes = 25;
  for (auto arch : {Architecture::mlp_res5, Architecture::mlp_a}) {
    ModelGraph with = build({.arch = arch}, in, classes, 5);
    for (auto& n : with.nodes()) {
      if (n.name.rfind("skip", 0) == 0) {
        for (auto& p : n.params) p.fill(0.0);
      }
    }
    const ModelGraph without = build({.arch = arch, .residual = false}, in, classes, 5);
    check(o, without.parameter_count() < with.parameter_count(), "twin has skips");
    const Tensor2 x = random_batch(100, in, 77);
    Workspace a, b;
    check(o, with.forward(x, Mode::infer, a) == without.forward(x, Mode::infer, b),
          std::string(architecture_name(arch)) + " differs from its twin");
  }
  if (o.pass) o.detail = "mlp_res5, mlp_a bit-exact on 100 inputs";
  return o;
}

// --- 6: training regression ---------------------------------------------------

// Held-out GAP@20 of the frozen logreg run (0.99376 on the first run),
// truncated. Features are 128 + 16 wide: at 1024 + 128 the 2000 training
// videos are too few and logreg overfits to 0.79 held out.
constexpr double kLogregFloor = 0.993;

Outcome ac6_training() {
  Outcome o;
  SyntheticConfig cfg;
  cfg.num_videos = 2500;
  cfg.num_classes = 25;
  cfg.rgb_dim = 128;
  cfg.audio_dim = 16;
  cfg.seed = 1;
  const auto [train_set, test_set] = split_tail(generate_synthetic(cfg), 500);

  TrainConfig tc;
  tc.optimizer.base_learning_rate = 0.01;
  tc.optimizer.batch_size = 128;
  tc.optimizer.max_steps = 1500;
  tc.eval_every = 1500;
  tc.shuffle_seed = derive_seed(1, hash_name("shuffle"));
  ModelGraph logreg = build({.arch = Architecture::logreg}, cfg.rgb_dim + cfg.audio_dim, cfg.num_classes, 1);
  train(logreg, train_set, nullptr, tc);
  const double gap = evaluate(logreg, test_set, 20).gap;
  check(o, gap >= kLogregFloor, "logreg gap " + fmt(gap) + " < " + fmt(kLogregFloor));

  TrainConfig mc = tc;
  mc.optimizer.base_learning_rate = 0.001;
  mc.optimizer.max_steps = 300;
  mc.eval_every = 300;
  std::vector<ModelGraph> members;
  std::vector<double> gaps;
  for (std::uint64_t i = 0; i < 4; ++i) {
    members.push_back(build({.arch = Architecture::mlp512_256}, cfg.rgb_dim + cfg.audio_dim, cfg.num_classes,
                            derive_seed(1, i)));
    mc.shuffle_seed = derive_seed(1, hash_name("shuffle") + i);
    train(members.back(), train_set, nullptr, mc);
    gaps.push_back(evaluate(members.back(), test_set, 20).gap);
  }
  const Tensor2 avg = average_models(members, feature_batch(test_set));
  const double ens = gap_at_k(top_k_lists(avg, test_set, 20), ground_truth(test_set), 20).gap;
  auto sorted = gaps;
  std::sort(sorted.begin(), sorted.end());
  const double median = 0.5 * (sorted[1] + sorted[2]);
  check(o, ens >= median, "ensemble " + fmt(ens) + " < median member " + fmt(median));
  if (o.pass) {
    o.detail = "logreg " + fmt(gap) + " >= " + fmt(kLogregFloor) + ", ensemble " + fmt(ens) +
               " >= median " + fmt(median);
  }
  return o;
}

// --- 7, 8: submission files ---------------------------------------------------

PredictionList random_list(Rng& rng, std::size_t index) {
  std::string id;
  const std::size_t len = 1 + rng.below(12);
  static const std::string alphabet = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-_";
  for (std::size_t i = 0; i < len; ++i) id += alphabet[rng.below(alphabet.size())];
  id += "_" + std::to_string(index);
  std::vector<LabelConfidence> pairs;
  const std::size_t n = rng.below(21);
  while (pairs.size() < n) {
    const auto label = static_cast<ClassIndex>(rng.below(4800));
    if (std::any_of(pairs.begin(), pairs.end(), [&](auto& p) { return p.label == label; })) continue;
    double conf = rng.uniform();
    switch (rng.below(6)) {
      case 0: conf = 0.0; break;
      case 1: conf = 1.0; break;
      case 2: conf = std::ldexp(conf, -static_cast<int>(rng.below(1000))); break;
      case 3: conf = std::round(conf * 1e6) / 1e6; break;
      default: break;
    }
    pairs.push_back({label, conf});
  }
  return PredictionList(id, pairs);
}

Outcome ac7_submission() {
  Outcome o;
  Rng rng(7);
  std::vector<PredictionList> lists;
  for (std::size_t i = 0; i < 1000; ++i) lists.push_back(random_list(rng, i));
  const auto path = work_dir() / "roundtrip.csv";
  write_submission(lists, path);
  check(o, parse_submission(path, 4800) == lists, "parse(write(x)) != x");

  const PredictionList fig("100000001", {{1, 0.5}, {2, 0.3}, {3, 0.1}, {4, 0.05}, {5, 0.05}});
  const auto fig_path = work_dir() / "figure.csv";
  write_submission(std::vector{fig}, fig_path);
  check(o, slurp(fig_path) == "VideoId,LabelConfidencePairs\n100000001,1 0.5 2 0.3 3 0.1 4 0.05 5 0.05\n",
        "sample row differs");

  const std::string h = "VideoId,LabelConfidencePairs\n";
  const std::vector<std::pair<std::string, ErrorCode>> bad{
      {"", ErrorCode::BadHeader},
      {"Video,Labels\nv,1 0.5\n", ErrorCode::BadHeader},
      {h + "v 1 0.5\n", ErrorCode::MalformedRow},
      {h + ",1 0.5\n", ErrorCode::EmptyVideoId},
      {h + "v\t1,1 0.5\n", ErrorCode::BadVideoId},
      {h + "v,1 0.5 2\n", ErrorCode::OddTokenCount},
      {h + "v,1 abc\n", ErrorCode::BadNumber},
      {h + "v,x 0.5\n", ErrorCode::BadNumber},
      {h + "v,-1 0.5\n", ErrorCode::BadNumber},
      {h + "v,1 nan\n", ErrorCode::BadNumber},
      {h + "v,4800 0.5\n", ErrorCode::LabelOutOfRange},
      {h + "v,1 0.5 1 0.4\n", ErrorCode::DuplicateLabel},
      {h + "v,1 0.5\nv,2 0.5\n", ErrorCode::DuplicateVideo},
  };
  const auto bad_path = work_dir() / "malformed.csv";
  for (const auto& [text, code] : bad) {
    spit(bad_path, text);
    const auto got = error_of([&] { parse_submission(bad_path, 4800); });
    check(o, got == code, "expected " + std::string(error_code_name(code)) + " for '" + text + "'");
  }
  check(o, error_of([&] { parse_submission(work_dir() / "absent.csv"); }) == ErrorCode::Io, "missing file");
  if (o.pass) o.detail = "1000 lists, sample row, " + std::to_string(bad.size() + 1) + " error cases";
  return o;
}

std::vector<PredictionList> random_file(Rng& rng, std::size_t videos, std::size_t k) {
  std::vector<PredictionList> out;
  for (std::size_t v = 0; v < videos; ++v) {
    if (rng.bernoulli(0.1)) continue;
    std::vector<LabelConfidence> pairs;
    const std::size_t n = rng.below(k + 1);
    while (pairs.size() < n) {
      const auto label = static_cast<ClassIndex>(rng.below(40));
      if (std::none_of(pairs.begin(), pairs.end(), [&](auto& p) { return p.label == label; })) {
        pairs.push_back({label, rng.uniform()});
      }
    }
    out.emplace_back("vid" + std::to_string(rng.below(1000)) + "_" + std::to_string(v), pairs);
  }
  return out;
}

Outcome ac8_file_averaging() {
  Outcome o;
  Rng rng(88);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t k = 1 + rng.below(20);
    std::vector<std::vector<PredictionList>> files;
    std::vector<fs::path> paths;
    for (int f = 0; f < 3; ++f) {
      files.push_back(random_file(rng, 100, 20));
      paths.push_back(work_dir() / ("avg" + std::to_string(f) + ".csv"));
      write_submission(files.back(), paths.back());
    }
    const auto out = work_dir() / "avg-out.csv";
    average_files(paths, k, out);
    const auto got = parse_submission(out);
    const auto want = oracle::average_files(files, k);
    check(o, got.size() == want.size(), "row count differs");
    for (std::size_t v = 0; v < std::min(got.size(), want.size()); ++v) {
      check(o, got[v].video_id() == want[v].video_id() && got[v].size() == want[v].size(),
            "row " + std::to_string(v) + " differs");
      if (got[v].size() != want[v].size()) continue;
      for (std::size_t i = 0; i < got[v].size(); ++i) {
        check(o, got[v].pairs()[i].label == want[v].pairs()[i].label, "label order differs");
        worst = std::max(worst, std::abs(got[v].pairs()[i].confidence - want[v].pairs()[i].confidence));
      }
    }
    const std::string reference = slurp(out);
    std::vector<std::size_t> order{0, 1, 2};
    while (std::next_permutation(order.begin(), order.end())) {
      const std::vector<fs::path> permuted{paths[order[0]], paths[order[1]], paths[order[2]]};
      average_files(permuted, k, work_dir() / "avg-perm.csv");
      check(o, slurp(work_dir() / "avg-perm.csv") == reference, "argument order changes the output");
    }
    const std::vector<fs::path> self{paths[0], paths[0], paths[0]};
    average_files(self, 20, work_dir() / "avg-self.csv");
    auto sorted = files[0];
    std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.video_id() < b.video_id(); });
    check(o, parse_submission(work_dir() / "avg-self.csv") == sorted, "self-average differs");
  }
  check(o, worst <= 1e-12, "max diff " + fmt(worst));
  if (o.pass) o.detail = "20 triples, max diff " + fmt(worst) + ", 6 orders, self-average";
  return o;
}

// --- 9: TFRecord --------------------------------------------------------------

Outcome ac9_tfrecord() {
  Outcome o;
  check(o, oracle::crc32c_bitwise("123456789") == 0xE3069283u, "reference crc");
  check(o, oracle::mask_crc(0xE3069283u) == 0xC78AB0E5u, "reference mask");
  check(o, crc32c::value(std::string_view("123456789")) == 0xE3069283u, "crc32c(123456789)");
  check(o, crc32c::mask(crc32c::value(std::string(32, '\0'))) == 0x0FD7FFFAu, "masked crc of 32 zeros");
  std::string iota(32, '\0');
  for (int i = 0; i < 32; ++i) iota[i] = static_cast<char>(i);
  check(o, crc32c::mask(crc32c::value(iota)) == 0x951F7892u, "masked crc of 0..31");
  const std::string framed = frame_record("abc");
  auto u32_at = [&](std::size_t off) {
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(framed[off + i]);
    return v;
  };
  check(o, u32_at(8) == 0x0E4999B0u && u32_at(15) == 0x21F1576Eu, "framing crcs of 'abc'");

  Rng rng(9);
  const auto path = work_dir() / "records.tfrecord";
  std::size_t flips = 0;
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::string> payloads(1 + rng.below(5));
    for (auto& p : payloads) {
      p.resize(rng.below(trial < 10 ? 16 : 600));
      for (auto& c : p) c = static_cast<char>(rng.below(256));
    }
    write_tfrecord_file(path, payloads);
    const std::string bytes = slurp(path);
    check(o, read_tfrecord_file(path) == payloads, "round trip");
    write_tfrecord_file(work_dir() / "rewrite.tfrecord", read_tfrecord_file(path));
    check(o, slurp(work_dir() / "rewrite.tfrecord") == bytes, "rewrite not byte-exact");
    // Short files: every bit; longer ones: a random sample.
    const std::size_t bits = bytes.size() * 8;
    const std::size_t samples = trial < 10 ? bits : std::min<std::size_t>(bits, 200);
    for (std::size_t s = 0; s < samples; ++s) {
      const std::size_t bit = trial < 10 ? s : rng.below(bits);
      std::string corrupt = bytes;
      corrupt[bit / 8] = static_cast<char>(corrupt[bit / 8] ^ (1 << (bit % 8)));
      spit(path, corrupt);
      const auto code = error_of([&] { read_tfrecord_file(path); });
      check(o, code == ErrorCode::CrcMismatch, "bit " + std::to_string(bit) + " of trial " +
                                                   std::to_string(trial) + " not a CrcMismatch");
      ++flips;
    }
  }
  if (o.pass) o.detail = "30 files round trip, " + std::to_string(flips) + " single-bit flips caught";
  return o;
}

// --- 10: scale ----------------------------------------------------------------

Outcome ac10_scale() {
  Outcome o;
  const auto log = work_dir() / "bench-eval.log";
  int code = tool("--seed 10 bench --rows 700640 --k 20 --dir \"" + work_dir().string() + "\"", log);
  std::string text = slurp(log);
  check(o, code == 0, "bench exited " + std::to_string(code) + ": " + text);
  const auto secs = field(text, "seconds"), rss = field(text, "peak_rss_bytes");
  check(o, secs && rss, "no RESULT line: " + text);
  if (!o.pass) return o;
  check(o, *secs <= 60.0, "parse+GAP took " + fmt(*secs) + " s");
  check(o, *rss <= 2e9, "peak RSS " + fmt(*rss / 1e9) + " GB");

  const auto log2 = work_dir() / "bench-avg.log";
  code = tool("--seed 10 bench --rows 700640 --k 20 --no-eval --avg-files --files 3 --dir \"" +
                  work_dir().string() + "\"",
              log2);
  text = slurp(log2);
  check(o, code == 0, "avg-files bench exited " + std::to_string(code) + ": " + text);
  const auto avg_secs = field(text, "seconds"), avg_rss = field(text, "peak_rss_bytes");
  check(o, avg_secs.has_value(), "no avg-files RESULT line: " + text);
  if (!o.pass) return o;
  check(o, *avg_secs <= 120.0, "avg-files took " + fmt(*avg_secs) + " s");
  if (o.pass) {
    o.detail = "eval " + fmt(*secs) + " s, " + fmt(*rss / 1e6) + " MB; avg-files x3 " + fmt(*avg_secs) +
               " s, " + fmt(avg_rss.value_or(0) / 1e6) + " MB";
  }
  return o;
}

// --- 11: determinism ----------------------------------------------------------

Outcome ac11_determinism() {
  Outcome o;
  const std::string small = " --classes 8 --rgb-dim 16 --audio-dim 8";
  std::array<std::vector<std::string>, 2> artifacts;
  const std::vector<std::string> names{"data.bin", "val.bin", "data.tfrecord", "logreg.ckpt", "logreg.csv",
                                       "mlp_e.ckpt", "mlp_e.csv", "moe32.ckpt", "a.csv", "b.csv", "c.csv",
                                       "avg.csv", "members.csv", "members.ckpt", "stack.csv"};
  for (int run = 0; run < 2; ++run) {
    const fs::path d = work_dir() / ("det" + std::to_string(run));
    fs::create_directories(d);
    auto p = [&](const std::string& n) { return "\"" + (d / n).string() + "\""; };
    spit(d / "members.json",
         R"({"members": [{"model": "logreg"}, {"model": "moe", "mixtures": 2}, {"model": "mlp_e", "hidden": [8, 8, 8]}],
             "train": {"steps": 10, "batch": 16}})");
    const std::vector<std::string> cmds{
        "--seed 11 gen-data --videos 120 --out " + p("data.bin") + " --holdout 30 --holdout-out " + p("val.bin") +
            small,
        "--seed 11 gen-data --videos 40 --format tfrecord --out " + p("data.tfrecord") + small,
        "--seed 11 train --model logreg --l1 1e-10 --steps 40 --batch 16 --eval-every 10 --data " + p("data.bin") +
            " --val " + p("val.bin") + " --checkpoint " + p("logreg.ckpt") + " --report " + p("logreg.csv") + small,
        "--seed 11 train --model mlp_e --hidden 12,12,12 --lr 5E-4 --steps 30 --batch 16 --eval-every 10 --data " +
            p("data.bin") + " --val " + p("val.bin") + " --include-validation --checkpoint " + p("mlp_e.ckpt") +
            " --report " + p("mlp_e.csv") + small,
        "--seed 11 --float32 train --model moe --mixtures 3 --steps 20 --batch 16 --data " + p("data.bin") +
            " --checkpoint " + p("moe32.ckpt") + small,
        "infer --checkpoint " + p("logreg.ckpt") + " --data " + p("val.bin") + " --out " + p("a.csv") + small,
        "infer --checkpoint " + p("mlp_e.ckpt") + " --data " + p("val.bin") + " --out " + p("b.csv") + small,
        "infer --checkpoint " + p("moe32.ckpt") + " --data " + p("val.bin") + " --round6 --out " + p("c.csv") + small,
        "ensemble avg-files --k 20 -o " + p("avg.csv") + " " + p("a.csv") + " " + p("b.csv") + " " + p("c.csv"),
        "--seed 11 ensemble avg-models --members " + p("members.json") + " --data " + p("data.bin") +
            " --predict " + p("val.bin") + " --out " + p("members.csv") + " --checkpoint " + p("members.ckpt") +
            small,
        "--seed 11 ensemble stack --members " + p("members.json") + " --data " + p("data.bin") + " --predict " +
            p("val.bin") + " --out " + p("stack.csv") + small,
    };
    for (const auto& c : cmds) {
      const int code = tool(c, d / "log.txt");
      check(o, code == 0, "'" + c + "' exited " + std::to_string(code) + ": " + slurp(d / "log.txt"));
      if (!o.pass) return o;
    }
    for (const auto& n : names) artifacts[run].push_back(slurp(d / n));
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    check(o, !artifacts[0][i].empty(), names[i] + " is empty");
    check(o, artifacts[0][i] == artifacts[1][i], names[i] + " differs between runs");
  }
  if (o.pass) o.detail = std::to_string(names.size()) + " artifacts byte-identical across runs";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*run)();
    double budget_seconds;  // 0: no runtime bound
  };
  const std::vector<Criterion> criteria{
      {"metric oracle equivalence", ac1_metric_oracle, 10},
      {"worked GAP example", ac2_worked_example, 0},
      {"gradient correctness", ac3_gradients, 60},
      {"MoE semantics", ac4_moe, 0},
      {"residual equivalence", ac5_residual, 0},
      {"training sanity regression", ac6_training, 300},
      {"submission round-trip", ac7_submission, 0},
      {"file-averaging oracle", ac8_file_averaging, 0},
      {"TFRecord integrity", ac9_tfrecord, 0},
      {"scale and performance", ac10_scale, 0},
      {"determinism", ac11_determinism, 0},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.pass && c.budget_seconds > 0 && secs > c.budget_seconds) {
      o = {false, "took " + fmt(secs) + " s, budget " + fmt(c.budget_seconds) + " s"};
    }
    failures += o.pass ? 0 : 1;
    std::cout << "AC" << (i + 1) << ' ' << (o.pass ? "PASS" : "FAIL") << ' ' << c.name << ": " << o.detail
              << " [" << fmt(secs) << " s]" << std::endl;
  }
  fs::remove_all(work_dir());
  return failures == 0 ? 0 : 1;
}
