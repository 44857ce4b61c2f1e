#include "yt8m/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "yt8m/bench.hpp"
#include "yt8m/checkpoint.hpp"
#include "yt8m/dataset.hpp"
#include "yt8m/ensemble.hpp"
#include "yt8m/error.hpp"
#include "yt8m/kernels.hpp"
#include "yt8m/metrics.hpp"
#include "yt8m/modelzoo.hpp"
#include "yt8m/rng.hpp"
#include "yt8m/submission.hpp"
#include "yt8m/training.hpp"

namespace yt8m {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::string_view module_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::LabelOutOfRange:
    case ErrorCode::BadDimension:
    case ErrorCode::EmptyVideoId:
    case ErrorCode::BadVideoId:
    case ErrorCode::DuplicateLabel:
    case ErrorCode::NonFiniteValue: return "datamodel";
    case ErrorCode::CrcMismatch:
    case ErrorCode::TruncatedRecord:
    case ErrorCode::BadMagic:
    case ErrorCode::MissingFeature:
    case ErrorCode::WrongType:
    case ErrorCode::MalformedProto:
    case ErrorCode::InvalidConfig: return "ingest";
    case ErrorCode::ShapeMismatch:
    case ErrorCode::NoCachedForward:
    case ErrorCode::BadCheckpoint: return "nncore";
    case ErrorCode::UnknownArchitecture:
    case ErrorCode::BadSpec: return "modelzoo";
    case ErrorCode::EmptyLabelRow:
    case ErrorCode::NonFiniteLoss: return "training";
    case ErrorCode::UnknownVideo:
    case ErrorCode::DuplicatePrediction: return "metrics";
    case ErrorCode::BadHeader:
    case ErrorCode::OddTokenCount:
    case ErrorCode::BadNumber:
    case ErrorCode::MalformedRow:
    case ErrorCode::DuplicateVideo: return "submission";
    case ErrorCode::Usage: return "cli";
    case ErrorCode::Io: return "io";
  }
  return "yt8m";
}

struct Globals {
  std::uint64_t seed = 0;
  bool float32 = false;
  int threads = 0;
  bool quiet = false;
};

struct SchemaFlags {
  std::size_t classes = kDefaultNumClasses;
  std::size_t rgb_dim = kDefaultRgbDim;
  std::size_t audio_dim = kDefaultAudioDim;

  Schema schema() const { return {classes, rgb_dim, audio_dim}; }
};

void add_schema_flags(CLI::App* app, SchemaFlags& s) {
  app->add_option("--classes", s.classes, "Vocabulary size (generated data, TFRecord input)")->capture_default_str();
  app->add_option("--rgb-dim", s.rgb_dim, "mean_rgb width (generated data, TFRecord input)")->capture_default_str();
  app->add_option("--audio-dim", s.audio_dim, "mean_audio width (generated data, TFRecord input)")->capture_default_str();
}

void require_file(const fs::path& p) {
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) fail(ErrorCode::Io, "no such file: " + p.string());
}

void require_writable(const fs::path& p) {
  const fs::path parent = p.has_parent_path() ? p.parent_path() : fs::path(".");
  std::error_code ec;
  if (!fs::is_directory(parent, ec)) fail(ErrorCode::Io, "no such directory: " + parent.string());
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) fail(ErrorCode::Io, "cannot write " + p.string());
}

// Visual-only runs: the audio block is dropped after loading.
void drop_audio(Dataset& data) {
  for (auto& ex : data.examples) ex.features.audio.clear();
  data.schema.audio_dim = 0;
}

// A checkpoint trained with --rgb-only reads rgb_dim features.
void fit_to_graph(const ModelGraph& graph, Dataset& data) {
  if (graph.input_dim() == data.schema.feature_dim()) return;
  if (data.schema.audio_dim > 0 && graph.input_dim() == data.schema.rgb_dim) {
    drop_audio(data);
    return;
  }
  fail(ErrorCode::ShapeMismatch, "model reads " + std::to_string(graph.input_dim()) +
                                     " features, data has " + std::to_string(data.schema.feature_dim()));
}

// --- gen-data -----------------------------------------------------------------

struct GenData {
  std::size_t videos = 0;
  SyntheticConfig cfg;
  SchemaFlags schema;
  fs::path out;
  std::string format = "native";
  std::size_t holdout = 0;
  fs::path holdout_out;
};

void run_gen_data(const GenData& o, const Globals& g, std::ostream& out) {
  require_writable(o.out);
  if (o.holdout > 0) {
    if (o.holdout_out.empty()) fail(ErrorCode::Usage, "--holdout needs --holdout-out");
    require_writable(o.holdout_out);
    if (o.holdout > o.videos) fail(ErrorCode::Usage, "--holdout exceeds --videos");
  }
  SyntheticConfig cfg = o.cfg;
  cfg.num_videos = o.videos;
  cfg.num_classes = o.schema.classes;
  cfg.rgb_dim = o.schema.rgb_dim;
  cfg.audio_dim = o.schema.audio_dim;
  cfg.seed = g.seed;
  const DataFormat fmt = o.format == "tfrecord" ? DataFormat::tfrecord : DataFormat::native;
  const Dataset data = generate_synthetic(cfg);
  if (o.holdout > 0) {
    auto [head, tail] = split_tail(data, o.holdout);
    write_dataset(o.out, head, fmt);
    write_dataset(o.holdout_out, tail, fmt);
    out << "RESULT videos=" << head.size() << " holdout=" << tail.size() << "\n";
  } else {
    write_dataset(o.out, data, fmt);
    out << "RESULT videos=" << data.size() << "\n";
  }
}

// --- train --------------------------------------------------------------------

struct Train {
  std::string model;
  std::size_t mixtures = 2;
  std::vector<std::size_t> hidden;
  double lr = 0.01;
  std::optional<double> l1, l2;
  double keep_prob = 0.5;
  std::size_t batch = 128;
  std::size_t steps = 1000;
  std::string optimizer = "adam";
  bool include_validation = false;
  bool no_residual = false;
  bool rgb_only = false;
  fs::path data, val, checkpoint, report;
  std::size_t eval_every = 100;
  std::size_t k = kDefaultTopK;
  std::size_t monitor = 1024;
  SchemaFlags schema;
};

TrainConfig train_config(const Train& o, const Globals& g) {
  TrainConfig cfg;
  cfg.optimizer.kind = o.optimizer == "sgd" ? OptimizerKind::sgd : OptimizerKind::adam;
  cfg.optimizer.base_learning_rate = o.lr;
  cfg.optimizer.batch_size = o.batch;
  cfg.optimizer.max_steps = o.steps;
  cfg.include_validation = o.include_validation;
  cfg.eval_every = o.eval_every;
  cfg.shuffle_seed = derive_seed(g.seed, hash_name("shuffle"));
  cfg.k = o.k;
  cfg.monitor_size = o.monitor;
  cfg.float32_params = g.float32;
  return cfg;
}

void print_progress(const TrainReport& r, std::ostream& err) {
  std::size_t gi = 0;
  for (const auto& [step, loss] : r.loss_curve) {
    if (gi < r.train_gap_curve.size() && r.train_gap_curve[gi].first == step) {
      err << "step " << step << " loss " << format_real(loss) << " gap "
          << format_real(r.train_gap_curve[gi].second) << "\n";
      ++gi;
    }
  }
}

void run_train(const Train& o, const Globals& g, std::ostream& out, std::ostream& err) {
  require_file(o.data);
  if (!o.val.empty()) require_file(o.val);
  require_writable(o.checkpoint);
  if (!o.report.empty()) require_writable(o.report);
  if (o.include_validation && o.val.empty()) fail(ErrorCode::Usage, "--include-validation needs --val");

  ArchitectureSpec spec;
  spec.arch = parse_architecture(o.model);
  spec.num_mixtures = o.mixtures;
  spec.hidden_sizes = o.hidden;
  spec.keep_prob = o.keep_prob;
  spec.residual = !o.no_residual;
  if (o.l1) spec.reg = RegConfig{Norm::l1, *o.l1};
  if (o.l2) spec.reg = RegConfig{Norm::l2, *o.l2};

  Dataset data = load_dataset(o.data, o.schema.schema());
  std::optional<Dataset> val;
  if (!o.val.empty()) val = load_dataset(o.val, o.schema.schema());
  if (o.rgb_only) {
    drop_audio(data);
    if (val) drop_audio(*val);
  }
  ModelGraph graph = build(spec, data.schema.feature_dim(), data.schema.num_classes, g.seed);

  TrainConfig cfg = train_config(o, g);
  cfg.checkpoint_path = o.checkpoint;
  const TrainReport report = train(graph, data, val ? &*val : nullptr, cfg);
  if (!o.report.empty()) write_report_csv(o.report, report);
  if (!g.quiet) print_progress(report, err);

  out << "RESULT steps=" << report.steps_run;
  if (!report.loss_curve.empty()) out << " loss=" << format_real(report.loss_curve.back().second);
  if (!report.train_gap_curve.empty()) {
    out << " monitor_gap=" << format_real(report.train_gap_curve.back().second);
  }
  if (val && !o.include_validation) {
    const GapReport held_out = evaluate(graph, *val, o.k);
    out << " val_gap=" << format_real(held_out.gap);
  }
  out << "\n";
}

// --- infer / eval -------------------------------------------------------------

struct Infer {
  fs::path checkpoint, data, out;
  std::size_t k = kDefaultTopK;
  bool round6 = false;
  SchemaFlags schema;
};

ConfidenceFormat confidence_format(bool round6) {
  return round6 ? ConfidenceFormat::six_digits : ConfidenceFormat::round_trip;
}

void run_infer(const Infer& o, std::ostream& out) {
  require_file(o.checkpoint);
  require_file(o.data);
  require_writable(o.out);
  const ModelGraph graph = load_checkpoint(o.checkpoint);
  Dataset data = load_dataset(o.data, o.schema.schema());
  fit_to_graph(graph, data);
  const auto lists = predict_top_k(graph, data, o.k);
  const std::size_t rows = write_submission(lists, o.out, confidence_format(o.round6));
  out << "RESULT rows=" << rows << "\n";
}

struct Eval {
  fs::path pred, truth;
  std::size_t k = kDefaultTopK;
  SchemaFlags schema;
};

void run_eval(const Eval& o, std::ostream& out) {
  require_file(o.pred);
  require_file(o.truth);
  const Dataset data = load_dataset(o.truth, o.schema.schema());
  const GroundTruth truth = ground_truth(data);
  GapAccumulator acc(truth, o.k);
  SubmissionReader reader(o.pred, data.schema.num_classes);
  while (auto list = reader.next()) acc.add(*list);
  const GapReport report = acc.finish();
  out << "RESULT gap=" << format_real(report.gap) << " n=" << report.num_predictions << "\n";
}

// --- ensemble -----------------------------------------------------------------

struct AvgFiles {
  std::size_t k = kDefaultTopK;
  fs::path out;
  std::vector<fs::path> inputs;
  bool round6 = false;
};

void run_avg_files(const AvgFiles& o, const Globals& g, std::ostream& out, std::ostream& err) {
  if (o.inputs.size() < 2) fail(ErrorCode::Usage, "avg-files needs at least two input files");
  for (const auto& p : o.inputs) require_file(p);
  require_writable(o.out);
  const AverageFilesResult r = average_files(o.inputs, o.k, o.out, confidence_format(o.round6));
  if (!g.quiet) {
    for (const auto& w : r.warnings) err << "warning: " << w << "\n";
  }
  out << "RESULT rows=" << r.rows << "\n";
}

struct ModelEnsemble {
  fs::path members;
  fs::path data, val, predict, out, checkpoint;
  std::optional<std::size_t> steps, batch;
  std::optional<double> lr;
  std::size_t k = kDefaultTopK;
  bool round6 = false;
  SchemaFlags schema;
};

// Member and meta entries of the --members file:
//   {"checkpoint": "path"}   a trained graph, used as is
//   {"model": "name", "hidden": [..], "mixtures": M, "keep_prob": q,
//    "l1" | "l2": p, "seed": s}   built and trained on --data
// Top level: {"members": [...], "meta": {...}, "joint": bool,
//             "freeze_members": bool,
//             "train": {"lr", "batch", "steps", "optimizer", "eval_every"}}
struct MemberSpec {
  std::optional<fs::path> checkpoint;
  ArchitectureSpec arch;
  std::uint64_t seed = 0;
};

MemberSpec parse_member(const json& j, std::uint64_t default_seed, const fs::path& base) {
  MemberSpec m;
  m.seed = j.value("seed", default_seed);
  if (j.contains("checkpoint")) {
    fs::path p = j.at("checkpoint").get<std::string>();
    m.checkpoint = p.is_relative() ? base / p : p;
    return m;
  }
  if (!j.contains("model")) fail(ErrorCode::BadSpec, "member needs \"checkpoint\" or \"model\"");
  m.arch.arch = parse_architecture(j.at("model").get<std::string>());
  if (j.contains("hidden")) m.arch.hidden_sizes = j.at("hidden").get<std::vector<std::size_t>>();
  m.arch.num_mixtures = j.value("mixtures", m.arch.num_mixtures);
  m.arch.keep_prob = j.value("keep_prob", m.arch.keep_prob);
  if (j.contains("l1")) m.arch.reg = RegConfig{Norm::l1, j.at("l1").get<double>()};
  if (j.contains("l2")) m.arch.reg = RegConfig{Norm::l2, j.at("l2").get<double>()};
  return m;
}

struct EnsembleFile {
  std::vector<MemberSpec> members;
  std::optional<MemberSpec> meta;
  bool joint = false;
  bool freeze_members = false;
  OptimizerConfig optimizer;
  std::size_t eval_every = 100;
};

EnsembleFile read_ensemble_file(const ModelEnsemble& o, std::uint64_t seed) {
  const fs::path& path = o.members;
  require_file(path);
  std::ifstream in(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorCode::BadSpec, path.string() + ": " + e.what());
  }
  EnsembleFile f;
  try {
    if (!j.contains("members") || !j.at("members").is_array()) {
      fail(ErrorCode::BadSpec, path.string() + ": \"members\" must be a list");
    }
    const fs::path base = path.parent_path();
    std::uint64_t i = 0;
    for (const auto& m : j.at("members")) f.members.push_back(parse_member(m, derive_seed(seed, i++), base));
    if (j.contains("meta")) f.meta = parse_member(j.at("meta"), derive_seed(seed, hash_name("meta")), base);
    f.joint = j.value("joint", false);
    f.freeze_members = j.value("freeze_members", false);
    if (j.contains("train")) {
      const auto& t = j.at("train");
      f.optimizer.base_learning_rate = t.value("lr", f.optimizer.base_learning_rate);
      f.optimizer.batch_size = t.value("batch", f.optimizer.batch_size);
      f.optimizer.max_steps = t.value("steps", f.optimizer.max_steps);
      f.optimizer.kind = t.value("optimizer", std::string("adam")) == "sgd" ? OptimizerKind::sgd
                                                                          : OptimizerKind::adam;
      f.eval_every = t.value("eval_every", f.eval_every);
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::BadSpec, path.string() + ": " + e.what());
  }
  if (o.steps) f.optimizer.max_steps = *o.steps;
  if (o.batch) f.optimizer.batch_size = *o.batch;
  if (o.lr) f.optimizer.base_learning_rate = *o.lr;
  return f;
}

TrainConfig ensemble_train_config(const EnsembleFile& f, const Globals& g, std::uint64_t key) {
  TrainConfig cfg;
  cfg.optimizer = f.optimizer;
  cfg.eval_every = f.eval_every;
  cfg.shuffle_seed = derive_seed(g.seed, key);
  cfg.float32_params = g.float32;
  return cfg;
}

ModelGraph materialize(const MemberSpec& m, std::size_t in_dim, std::size_t out_dim) {
  if (m.checkpoint) {
    require_file(*m.checkpoint);
    ModelGraph graph = load_checkpoint(*m.checkpoint);
    if (graph.input_dim() != in_dim || graph.output_dim() != out_dim) {
      fail(ErrorCode::ShapeMismatch, m.checkpoint->string() + " does not fit the data schema");
    }
    return graph;
  }
  return build(m.arch, in_dim, out_dim, m.seed);
}

struct Loaded {
  Dataset data;
  std::optional<Dataset> val;
  Dataset scored;
};

Loaded load_ensemble_data(const ModelEnsemble& o) {
  require_file(o.data);
  if (!o.val.empty()) require_file(o.val);
  if (!o.predict.empty()) require_file(o.predict);
  require_writable(o.out);
  if (!o.checkpoint.empty()) require_writable(o.checkpoint);
  Loaded l;
  l.data = load_dataset(o.data, o.schema.schema());
  if (!o.val.empty()) l.val = load_dataset(o.val, o.schema.schema());
  l.scored = o.predict.empty() ? l.data : load_dataset(o.predict, o.schema.schema());
  return l;
}

void report_predictions(const Tensor2& scores, const Dataset& scored, const ModelEnsemble& o,
                        std::ostream& out, const std::string& extra) {
  const auto lists = top_k_lists(scores, scored, o.k);
  const std::size_t rows = write_submission(lists, o.out, confidence_format(o.round6));
  const GapReport gap = gap_at_k(lists, ground_truth(scored), o.k);
  out << "RESULT gap=" << format_real(gap.gap) << " n=" << gap.num_predictions << " rows=" << rows
      << extra << "\n";
}

void run_avg_models(const ModelEnsemble& o, const Globals& g, std::ostream& out, std::ostream& err) {
  const EnsembleFile f = read_ensemble_file(o, g.seed);
  if (f.members.size() < 2) fail(ErrorCode::Usage, "avg-models needs at least two members");
  const Loaded l = load_ensemble_data(o);
  const std::size_t in_dim = l.data.schema.feature_dim(), out_dim = l.data.schema.num_classes;

  std::vector<ModelGraph> graphs;
  for (const auto& m : f.members) graphs.push_back(materialize(m, in_dim, out_dim));

  std::string extra;
  if (f.joint) {
    ModelGraph joint = compose_average(graphs, g.seed);
    const TrainReport r = train(joint, l.data, l.val ? &*l.val : nullptr,
                                ensemble_train_config(f, g, hash_name("joint")));
    if (!g.quiet) print_progress(r, err);
    if (!o.checkpoint.empty()) save_checkpoint(o.checkpoint, joint);
    report_predictions(predict(joint, l.scored), l.scored, o, out, "");
    return;
  }
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    if (!f.members[i].checkpoint) {
      const TrainReport r = train(graphs[i], l.data, l.val ? &*l.val : nullptr,
                                  ensemble_train_config(f, g, i));
      if (!g.quiet) {
        err << "member " << i << "\n";
        print_progress(r, err);
      }
    }
    extra += " member" + std::to_string(i) + "_gap=" + format_real(evaluate(graphs[i], l.scored, o.k).gap);
  }
  if (!o.checkpoint.empty()) save_checkpoint(o.checkpoint, compose_average(graphs, g.seed));
  report_predictions(average_models(graphs, feature_batch(l.scored)), l.scored, o, out, extra);
}

void run_stack(const ModelEnsemble& o, const Globals& g, std::ostream& out, std::ostream& err) {
  const EnsembleFile f = read_ensemble_file(o, g.seed);
  if (f.members.empty()) fail(ErrorCode::Usage, "stack needs at least one member");
  const Loaded l = load_ensemble_data(o);
  const std::size_t in_dim = l.data.schema.feature_dim(), out_dim = l.data.schema.num_classes;

  std::vector<ModelGraph> graphs;
  for (const auto& m : f.members) graphs.push_back(materialize(m, in_dim, out_dim));
  std::size_t meta_in = 0;
  for (const auto& m : graphs) meta_in += m.output_dim();
  MemberSpec meta_spec;
  meta_spec.arch = default_stack_meta();
  meta_spec.seed = derive_seed(g.seed, hash_name("meta"));
  if (f.meta) meta_spec = *f.meta;
  const ModelGraph meta = materialize(meta_spec, meta_in, out_dim);

  ModelGraph stacked = compose_stack(graphs, meta, f.freeze_members, g.seed);
  const TrainReport r = train(stacked, l.data, l.val ? &*l.val : nullptr,
                              ensemble_train_config(f, g, hash_name("stack")));
  if (!g.quiet) print_progress(r, err);
  if (!o.checkpoint.empty()) save_checkpoint(o.checkpoint, stacked);
  report_predictions(predict(stacked, l.scored), l.scored, o, out, "");
}

// --- bench --------------------------------------------------------------------

struct Bench {
  std::size_t rows = 700640;
  std::size_t k = kDefaultTopK;
  bool avg_files = false;
  bool no_eval = false;
  std::size_t files = 3;
  fs::path report;
  fs::path dir;
};

void run_bench(const Bench& o, const Globals& g, std::ostream& out) {
  if (!o.report.empty()) require_writable(o.report);
  std::optional<fs::path> dir;
  if (!o.dir.empty()) dir = o.dir;
  if (o.no_eval && !o.avg_files) fail(ErrorCode::Usage, "--no-eval leaves nothing to run");
  std::vector<BenchResult> results;
  if (!o.no_eval) results.push_back(bench_eval(o.rows, o.k, g.seed, dir));
  if (o.avg_files) results.push_back(bench_avg_files(o.rows, o.k, o.files, g.seed, dir));
  for (const auto& r : results) {
    out << "RESULT task=" << r.task << " rows=" << r.rows << " k=" << r.k
        << " threads=" << r.threads << " seconds=" << format_real(r.wall_seconds)
        << " rows_per_s=" << format_real(r.rows_per_second)
        << " bytes_per_s=" << format_real(r.bytes_per_second)
        << " peak_rss_bytes=" << r.peak_rss_bytes;
    if (r.task == "eval") out << " gap=" << format_real(r.gap);
    out << "\n";
  }
  if (!o.report.empty()) write_text(o.report, bench_csv(results));
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"YouTube-8M video-level lab: data, models, GAP, submissions, ensembles", "yt8m"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML file of defaults; flags override it");
  Globals g;
  app.add_option("--seed", g.seed, "Seed for data, initialization, shuffling, and dropout")
      ->capture_default_str();
  app.add_flag("--float32", g.float32, "Round parameters to 32-bit floats after every update");
  app.add_option("--threads", g.threads, "Worker threads for parallel kernels (0 = runtime default)")
      ->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", g.quiet, "Only print RESULT lines and errors");

  GenData gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Write a synthetic linear-teacher dataset");
  gen_cmd->add_option("--videos", gen.videos, "Number of videos")->required();
  add_schema_flags(gen_cmd, gen.schema);
  gen_cmd->add_option("--sparsity", gen.cfg.teacher_sparsity, "Teacher weight density")->capture_default_str();
  gen_cmd->add_option("--noise", gen.cfg.noise_std, "Feature noise added after labeling")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output dataset path")->required();
  gen_cmd->add_option("--format", gen.format, "native or tfrecord")
      ->check(CLI::IsMember({"native", "tfrecord"}))
      ->capture_default_str();
  gen_cmd->add_option("--holdout", gen.holdout, "Move the last N videos to --holdout-out");
  gen_cmd->add_option("--holdout-out", gen.holdout_out, "Path for the held-out videos");

  Train tr;
  auto* train_cmd = app.add_subcommand("train", "Train one architecture and write a checkpoint");
  std::vector<std::string> model_names;
  for (auto a : all_architectures()) model_names.emplace_back(architecture_name(a));
  train_cmd->add_option("--model", tr.model, "Architecture")->required()->check(CLI::IsMember(model_names));
  train_cmd->add_option("--mixtures", tr.mixtures, "Experts per class (moe, moe_c)")->capture_default_str();
  train_cmd->add_option("--hidden", tr.hidden, "Hidden layer widths, comma separated")->delimiter(',');
  train_cmd->add_option("--lr", tr.lr, "Base learning rate")->capture_default_str();
  auto* l1 = train_cmd->add_option("--l1", tr.l1, "L1 weight penalty");
  auto* l2 = train_cmd->add_option("--l2", tr.l2, "L2 weight penalty");
  l1->excludes(l2);
  train_cmd->add_option("--keep-prob", tr.keep_prob, "Dropout keep probability")->capture_default_str();
  train_cmd->add_option("--batch", tr.batch, "Mini-batch size")->capture_default_str();
  train_cmd->add_option("--steps", tr.steps, "Number of updates")->capture_default_str();
  train_cmd->add_option("--optimizer", tr.optimizer, "adam or sgd")
      ->check(CLI::IsMember({"adam", "sgd"}))
      ->capture_default_str();
  train_cmd->add_flag("--include-validation", tr.include_validation, "Train on --val as well");
  train_cmd->add_flag("--rgb-only", tr.rgb_only, "Train on mean_rgb alone (infer follows the checkpoint)");
  train_cmd->add_flag("--no-residual", tr.no_residual, "Drop skip projections (mlp_res5, mlp_a, mlp_e)");
  train_cmd->add_option("--data", tr.data, "Training set")->required();
  train_cmd->add_option("--val", tr.val, "Validation set");
  train_cmd->add_option("--checkpoint", tr.checkpoint, "Checkpoint output path")->required();
  train_cmd->add_option("--report", tr.report, "Write the step,loss,gap curve as CSV");
  train_cmd->add_option("--eval-every", tr.eval_every, "Steps between GAP evaluations")->capture_default_str();
  train_cmd->add_option("--k", tr.k, "Top-k for GAP")->capture_default_str();
  train_cmd->add_option("--monitor-size", tr.monitor, "Examples in the GAP monitoring slice")->capture_default_str();
  add_schema_flags(train_cmd, tr.schema);

  Infer inf;
  auto* infer_cmd = app.add_subcommand("infer", "Write a submission from a checkpoint");
  infer_cmd->add_option("--checkpoint", inf.checkpoint, "Trained checkpoint")->required();
  infer_cmd->add_option("--data", inf.data, "Dataset to score")->required();
  infer_cmd->add_option("--k", inf.k, "Pairs per video")->capture_default_str();
  infer_cmd->add_option("--out", inf.out, "Submission CSV")->required();
  infer_cmd->add_flag("--round6", inf.round6, "Write at most six fractional digits");
  add_schema_flags(infer_cmd, inf.schema);

  Eval ev;
  auto* eval_cmd = app.add_subcommand("eval", "Score a submission with GAP@k");
  eval_cmd->add_option("--pred", ev.pred, "Submission CSV")->required();
  eval_cmd->add_option("--truth", ev.truth, "Dataset with ground-truth labels")->required();
  eval_cmd->add_option("--k", ev.k, "Top-k cap")->capture_default_str();
  add_schema_flags(eval_cmd, ev.schema);

  auto* ens_cmd = app.add_subcommand("ensemble", "Fuse models or submission files");
  ens_cmd->require_subcommand(1);
  AvgFiles af;
  auto* af_cmd = ens_cmd->add_subcommand("avg-files", "Average submission files");
  af_cmd->add_option("--k", af.k, "Pairs per video in the output")->capture_default_str();
  af_cmd->add_option("-o,--out", af.out, "Output CSV")->required();
  af_cmd->add_option("inputs", af.inputs, "Two or more submission files")->required();
  af_cmd->add_flag("--round6", af.round6, "Write at most six fractional digits");

  ModelEnsemble am, st;
  auto model_ensemble_flags = [](CLI::App* cmd, ModelEnsemble& o) {
    cmd->add_option("--members", o.members, "JSON ensemble description")->required();
    cmd->add_option("--data", o.data, "Training set")->required();
    cmd->add_option("--val", o.val, "Validation set");
    cmd->add_option("--predict", o.predict, "Dataset to score (default: --data)");
    cmd->add_option("--out", o.out, "Submission CSV")->required();
    cmd->add_option("--checkpoint", o.checkpoint, "Write the composed graph");
    cmd->add_option("--steps", o.steps, "Override train.steps of the members file");
    cmd->add_option("--batch", o.batch, "Override train.batch");
    cmd->add_option("--lr", o.lr, "Override train.lr");
    cmd->add_option("--k", o.k, "Pairs per video")->capture_default_str();
    cmd->add_flag("--round6", o.round6, "Write at most six fractional digits");
    add_schema_flags(cmd, o.schema);
  };
  auto* am_cmd = ens_cmd->add_subcommand("avg-models", "Average member outputs");
  model_ensemble_flags(am_cmd, am);
  auto* st_cmd = ens_cmd->add_subcommand("stack", "Train a meta network on member outputs");
  model_ensemble_flags(st_cmd, st);

  Bench be;
  auto* bench_cmd = app.add_subcommand("bench", "Time parse+GAP (and file averaging) at scale");
  bench_cmd->add_option("--rows", be.rows, "Videos in the generated submission")->capture_default_str();
  bench_cmd->add_option("--k", be.k, "Pairs per video")->capture_default_str();
  bench_cmd->add_flag("--avg-files", be.avg_files, "Also time averaging of --files submissions");
  bench_cmd->add_flag("--no-eval", be.no_eval, "Skip the parse+GAP timing");
  bench_cmd->add_option("--files", be.files, "Files to average")->capture_default_str();
  bench_cmd->add_option("--report", be.report, "Write results as CSV");
  bench_cmd->add_option("--dir", be.dir, "Scratch directory (default: a temporary one)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  if (g.threads > 0) kernels::set_num_threads(g.threads);
  std::string where = "yt8m";
  try {
    if (*gen_cmd) {
      where = "gen-data";
      run_gen_data(gen, g, out);
    } else if (*train_cmd) {
      where = "train";
      run_train(tr, g, out, err);
    } else if (*infer_cmd) {
      where = "infer";
      run_infer(inf, out);
    } else if (*eval_cmd) {
      where = "eval";
      run_eval(ev, out);
    } else if (*af_cmd) {
      where = "ensemble avg-files";
      run_avg_files(af, g, out, err);
    } else if (*am_cmd) {
      where = "ensemble avg-models";
      run_avg_models(am, g, out, err);
    } else if (*st_cmd) {
      where = "ensemble stack";
      run_stack(st, g, out, err);
    } else if (*bench_cmd) {
      where = "bench";
      run_bench(be, g, out);
    }
  } catch (const Error& e) {
    err << "yt8m " << where << ": " << module_of(e.code()) << ": " << e.what() << "\n";
    if (e.code() == ErrorCode::Usage) err << "run 'yt8m " << where << " --help' for usage\n";
    return e.is_io() ? 2 : 1;
  } catch (const fs::filesystem_error& e) {
    err << "yt8m " << where << ": io: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "yt8m " << where << ": " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace yt8m
