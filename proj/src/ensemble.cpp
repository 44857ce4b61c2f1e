#include "yt8m/ensemble.hpp"

#include <algorithm>
#include <unordered_map>

#include "yt8m/error.hpp"

namespace yt8m {

namespace {

void check_members(std::size_t n, std::size_t in_dim, std::size_t out_dim,
                   std::size_t got_in, std::size_t got_out) {
  if (got_in != in_dim || got_out != out_dim) {
    fail(ErrorCode::ShapeMismatch, "member " + std::to_string(n) + " maps " +
                                       std::to_string(got_in) + " -> " + std::to_string(got_out) +
                                       ", expected " + std::to_string(in_dim) + " -> " +
                                       std::to_string(out_dim));
  }
}

// Copies every non-input node of `src` into `dst` under `prefix`, with the
// source input node standing for `input_id`. Returns the id of the copy of
// src's output.
std::size_t splice(ModelGraph& dst, const ModelGraph& src, const std::string& prefix,
                   std::size_t input_id, bool freeze) {
  std::vector<std::size_t> remap(src.nodes().size());
  remap[0] = input_id;
  for (std::size_t i = 1; i < src.nodes().size(); ++i) {
    Node copy = src.nodes()[i];
    copy.name = prefix + copy.name;
    for (auto& in : copy.inputs) in = remap[in];
    if (freeze) copy.trainable = false;
    remap[i] = dst.append(std::move(copy));
  }
  return remap.back();
}

}  // namespace

Tensor2 average_models(std::span<const ModelGraph* const> members, const Tensor2& batch) {
  if (members.size() < 2) fail(ErrorCode::BadSpec, "an ensemble needs at least two members");
  const std::size_t in_dim = members[0]->input_dim();
  const std::size_t out_dim = members[0]->output_dim();
  std::vector<Tensor2> outs;
  Workspace ws;
  for (std::size_t i = 0; i < members.size(); ++i) {
    check_members(i, in_dim, out_dim, members[i]->input_dim(), members[i]->output_dim());
    outs.push_back(members[i]->forward(batch, Mode::infer, ws));
  }
  // Same arithmetic as the composed graph's averaging node.
  Tensor2 mean(outs[0].rows(), outs[0].cols());
  const auto n = static_cast<long double>(outs.size());
  auto dst = mean.values();
  for (std::size_t j = 0; j < dst.size(); ++j) {
    long double acc = 0.0L;
    for (const auto& o : outs) acc += o.values()[j];
    dst[j] = static_cast<double>(acc / n);
  }
  return mean;
}

Tensor2 average_models(std::span<const ModelGraph> members, const Tensor2& batch) {
  std::vector<const ModelGraph*> ptrs;
  for (const auto& m : members) ptrs.push_back(&m);
  return average_models(std::span<const ModelGraph* const>(ptrs), batch);
}

ModelGraph compose_average(std::span<const ModelGraph> members, std::uint64_t seed) {
  if (members.size() < 2) fail(ErrorCode::BadSpec, "an ensemble needs at least two members");
  const std::size_t in_dim = members[0].input_dim();
  const std::size_t out_dim = members[0].output_dim();
  ModelGraph g(in_dim, seed);
  std::vector<std::size_t> outs;
  for (std::size_t i = 0; i < members.size(); ++i) {
    check_members(i, in_dim, out_dim, members[i].input_dim(), members[i].output_dim());
    outs.push_back(splice(g, members[i], "m" + std::to_string(i) + "/", 0, false));
  }
  g.add(outs, "average", 1.0, members.size());
  return g;
}

ModelGraph compose_stack(std::span<const ModelGraph> members, const ModelGraph& meta,
                         bool freeze_members, std::uint64_t seed) {
  if (members.empty()) fail(ErrorCode::BadSpec, "stacking needs at least one member");
  const std::size_t in_dim = members[0].input_dim();
  std::size_t total = 0;
  for (const auto& m : members) {
    if (m.input_dim() != in_dim) {
      fail(ErrorCode::ShapeMismatch, "members disagree on input width");
    }
    total += m.output_dim();
  }
  if (meta.input_dim() != total) {
    fail(ErrorCode::ShapeMismatch, "meta reads " + std::to_string(meta.input_dim()) +
                                       " features, members emit " + std::to_string(total));
  }
  ModelGraph g(in_dim, seed);
  std::vector<std::size_t> outs;
  for (std::size_t i = 0; i < members.size(); ++i) {
    outs.push_back(splice(g, members[i], "m" + std::to_string(i) + "/", 0, freeze_members));
  }
  const std::size_t joined = g.concat(outs, "stack/concat");
  splice(g, meta, "meta/", joined, false);
  if (meta.reg().norm != Norm::none) g.set_reg(meta.reg());
  return g;
}

Tensor2 stack_models(std::span<const ModelGraph> members, const ModelGraph& meta,
                     const Tensor2& batch, Mode mode) {
  const ModelGraph g = compose_stack(members, meta, false, meta.seed());
  Workspace ws;
  return g.forward(batch, mode, ws);
}

namespace {

struct Contribution {
  ClassIndex label;
  double confidence;
};

}  // namespace

AverageFilesResult average_files(std::span<const std::filesystem::path> paths, std::size_t k,
                                 const std::filesystem::path& out, ConfidenceFormat format) {
  if (paths.size() < 2) fail(ErrorCode::Usage, "averaging needs at least two submission files");

  std::unordered_map<std::string, std::uint32_t> index_of;
  std::vector<std::string> ids;
  std::vector<std::vector<Contribution>> contributions;
  std::vector<std::uint32_t> files_with_video;

  for (const auto& path : paths) {
    try {
      SubmissionReader reader(path);
      while (auto list = reader.next()) {
        auto [it, inserted] =
            index_of.try_emplace(list->video_id(), static_cast<std::uint32_t>(ids.size()));
        if (inserted) {
          ids.push_back(list->video_id());
          contributions.emplace_back().reserve(list->size() * paths.size());
          files_with_video.push_back(0);
        }
        auto& bucket = contributions[it->second];
        for (const auto& p : list->pairs()) bucket.push_back({p.label, p.confidence});
        ++files_with_video[it->second];
      }
    } catch (const Error& e) {
      fail(e.code(), path.string() + ": " + e.detail());
    }
  }

  AverageFilesResult result;
  for (auto n : files_with_video) {
    if (n != paths.size()) ++result.videos_missing_somewhere;
  }
  if (result.videos_missing_somewhere > 0) {
    result.warnings.push_back("VideoSetMismatch: " + std::to_string(result.videos_missing_somewhere) +
                              " of " + std::to_string(ids.size()) +
                              " videos are missing from at least one file");
  }

  std::vector<std::uint32_t> order(ids.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::uint32_t a, std::uint32_t b) { return ids[a] < ids[b]; });

  const double n = static_cast<double>(paths.size());
  SubmissionWriter writer(out, format);
  std::vector<LabelConfidence> merged;
  for (std::uint32_t v : order) {
    auto& bucket = contributions[v];
    std::sort(bucket.begin(), bucket.end(), [](const Contribution& a, const Contribution& b) {
      if (a.label != b.label) return a.label < b.label;
      return a.confidence < b.confidence;
    });
    merged.clear();
    for (std::size_t i = 0; i < bucket.size();) {
      const ClassIndex label = bucket[i].label;
      long double sum = 0.0L;
      for (; i < bucket.size() && bucket[i].label == label; ++i) sum += bucket[i].confidence;
      merged.push_back({label, static_cast<double>(sum / n)});
    }
    std::vector<Contribution>().swap(bucket);
    writer.write(PredictionList(std::move(ids[v]), merged, k));
  }
  result.rows = writer.close();
  return result;
}

}  // namespace yt8m
