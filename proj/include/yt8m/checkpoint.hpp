#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "yt8m/graph.hpp"

namespace yt8m {

// "YTCK" checkpoint, all integers little-endian:
//   "YTCK" 0x01
//   u64 seed | u64 mask_step | u8 reg norm | f64 reg penalty | u32 node count
//   per node (topological order):
//     u8 kind | u16 name length | name | u32 out_dim | u8 trainable | u8 init
//     f64 keep_prob | f64 scale | u32 group | u32 classes
//     u16 input count | u32 input ids... | u16 param count | (u32 rows, u32 cols)...
//   every parameter tensor as f64 values, nodes in order, row-major

std::string serialize_checkpoint(const ModelGraph& graph);
ModelGraph deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const ModelGraph& graph);
/// Errors: Io, BadMagic, BadCheckpoint.
ModelGraph load_checkpoint(const std::filesystem::path& path);

}  // namespace yt8m
