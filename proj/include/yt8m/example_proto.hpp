#pragma once

#include <string>
#include <string_view>

#include "yt8m/datamodel.hpp"

namespace yt8m {

// Minimal tf.Example codec for the video-level schema:
//   "video_id"   bytes_list, one value
//   "labels"     int64_list
//   "mean_rgb"   float_list, rgb_dim values
//   "mean_audio" float_list, audio_dim values
// The decoder accepts packed and unpacked numeric lists and ignores unknown
// feature keys. Numeric lists are written packed.

std::string encode_video_example(const Example& ex);

/// Throws MissingFeature(name), WrongType(name), MalformedProto, or any
/// validate_example error. Labels come back sorted ascending.
Example decode_video_example(std::string_view payload, const Schema& schema);

}  // namespace yt8m
