#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "yt8m/graph.hpp"
#include "yt8m/submission.hpp"

namespace yt8m {

/// Mean of the members' infer-mode outputs: the member-order sum divided by n,
/// both in long double and rounded once, so n identical members reproduce one.
/// Errors: ShapeMismatch, BadSpec (fewer than two members).
Tensor2 average_models(std::span<const ModelGraph* const> members, const Tensor2& batch);
Tensor2 average_models(std::span<const ModelGraph> members, const Tensor2& batch);

/// One graph holding every member side by side (nodes renamed "m<i>/<name>",
/// all reading the shared input) whose output is an add node with divisor n.
/// Training it updates all members on shared batches against a single loss
/// on the averaged output.
ModelGraph compose_average(std::span<const ModelGraph> members, std::uint64_t seed);

/// Members side by side, their outputs concatenated and fed to a copy of
/// `meta` (nodes renamed "meta/<name>"). With freeze_members the member nodes
/// are marked non-trainable. Errors: ShapeMismatch when meta.input_dim differs
/// from the summed member output widths.
ModelGraph compose_stack(std::span<const ModelGraph> members, const ModelGraph& meta,
                         bool freeze_members, std::uint64_t seed);

Tensor2 stack_models(std::span<const ModelGraph> members, const ModelGraph& meta,
                     const Tensor2& batch, Mode mode);

struct AverageFilesResult {
  std::size_t rows = 0;
  std::size_t videos_missing_somewhere = 0;  // union semantics: a warning only
  std::vector<std::string> warnings;
};

/// Per (video, label) mean over all files, absent labels counting as 0, then
/// top-k per video. Videos present in any file are emitted in ascending id
/// order. Each (video, label) sum adds contributions in ascending value order,
/// so the result does not depend on the order of `paths`.
/// Errors: Usage (fewer than two files), any parse error prefixed with its file.
AverageFilesResult average_files(std::span<const std::filesystem::path> paths, std::size_t k,
                                 const std::filesystem::path& out,
                                 ConfidenceFormat format = ConfidenceFormat::round_trip);

}  // namespace yt8m
