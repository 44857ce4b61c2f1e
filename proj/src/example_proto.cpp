#include "yt8m/example_proto.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <optional>

#include "le_bytes.hpp"
#include "yt8m/error.hpp"

namespace yt8m {

namespace {

enum WireType : std::uint32_t { kVarint = 0, kFixed64 = 1, kLengthDelimited = 2, kFixed32 = 5 };

// --- encoding ---------------------------------------------------------------

void put_varint(std::string& out, std::uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<char>((v & 0x7f) | 0x80));
    v >>= 7;
  }
  out.push_back(static_cast<char>(v));
}

void put_tag(std::string& out, std::uint32_t field, WireType wt) {
  put_varint(out, (std::uint64_t{field} << 3) | wt);
}

void put_len(std::string& out, std::uint32_t field, std::string_view bytes) {
  put_tag(out, field, kLengthDelimited);
  put_varint(out, bytes.size());
  out.append(bytes);
}

std::string bytes_feature(std::string_view value) {
  std::string list;
  put_len(list, 1, value);
  std::string feature;
  put_len(feature, 1, list);
  return feature;
}

std::string float_feature(const std::vector<float>& values) {
  std::string packed;
  for (float v : values) le::put_f32(packed, v);
  std::string list;
  put_len(list, 1, packed);
  std::string feature;
  put_len(feature, 2, list);
  return feature;
}

std::string int64_feature(const std::vector<ClassIndex>& values) {
  std::string packed;
  for (ClassIndex v : values) put_varint(packed, static_cast<std::uint64_t>(std::int64_t{v}));
  std::string list;
  put_len(list, 1, packed);
  std::string feature;
  put_len(feature, 3, list);
  return feature;
}

void put_entry(std::string& features, std::string_view key, const std::string& feature) {
  std::string entry;
  put_len(entry, 1, key);
  put_len(entry, 2, feature);
  put_len(features, 1, entry);
}

// --- decoding ---------------------------------------------------------------

class WireReader {
 public:
  explicit WireReader(std::string_view buf) : buf_(buf) {}

  bool done() const noexcept { return pos_ >= buf_.size(); }

  std::uint64_t varint() {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
      if (pos_ >= buf_.size()) fail(ErrorCode::MalformedProto, "truncated varint");
      const auto byte = static_cast<unsigned char>(buf_[pos_++]);
      v |= std::uint64_t{byte & 0x7fu} << shift;
      if ((byte & 0x80u) == 0) return v;
    }
    fail(ErrorCode::MalformedProto, "varint longer than 10 bytes");
  }

  std::pair<std::uint32_t, std::uint32_t> tag() {
    const std::uint64_t t = varint();
    return {static_cast<std::uint32_t>(t >> 3), static_cast<std::uint32_t>(t & 7u)};
  }

  std::string_view bytes(std::size_t n) {
    if (buf_.size() - pos_ < n) fail(ErrorCode::MalformedProto, "field runs past message end");
    auto out = buf_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  std::string_view length_delimited() { return bytes(varint()); }

  void skip(std::uint32_t wire_type) {
    switch (wire_type) {
      case kVarint: varint(); break;
      case kFixed64: bytes(8); break;
      case kLengthDelimited: length_delimited(); break;
      case kFixed32: bytes(4); break;
      default: fail(ErrorCode::MalformedProto, "unsupported wire type " + std::to_string(wire_type));
    }
  }

 private:
  std::string_view buf_;
  std::size_t pos_ = 0;
};

struct FeatureView {
  std::uint32_t kind = 0;  // 0 unset, 1 bytes, 2 float, 3 int64
  std::string_view list;
};

FeatureView parse_feature(std::string_view bytes) {
  FeatureView out;
  WireReader r(bytes);
  while (!r.done()) {
    auto [field, wt] = r.tag();
    if (field >= 1 && field <= 3 && wt == kLengthDelimited) {
      out.kind = field;
      out.list = r.length_delimited();
    } else {
      r.skip(wt);
    }
  }
  return out;
}

std::map<std::string, FeatureView, std::less<>> parse_features(std::string_view payload) {
  std::map<std::string, FeatureView, std::less<>> out;
  WireReader example(payload);
  while (!example.done()) {
    auto [field, wt] = example.tag();
    if (field != 1 || wt != kLengthDelimited) {
      example.skip(wt);
      continue;
    }
    WireReader features(example.length_delimited());
    while (!features.done()) {
      auto [ffield, fwt] = features.tag();
      if (ffield != 1 || fwt != kLengthDelimited) {
        features.skip(fwt);
        continue;
      }
      WireReader entry(features.length_delimited());
      std::string key;
      std::string_view value;
      while (!entry.done()) {
        auto [efield, ewt] = entry.tag();
        if (efield == 1 && ewt == kLengthDelimited) {
          key = std::string(entry.length_delimited());
        } else if (efield == 2 && ewt == kLengthDelimited) {
          value = entry.length_delimited();
        } else {
          entry.skip(ewt);
        }
      }
      out[key] = parse_feature(value);
    }
  }
  return out;
}

const FeatureView& require(const std::map<std::string, FeatureView, std::less<>>& features,
                           std::string_view name, std::uint32_t kind) {
  auto it = features.find(name);
  if (it == features.end()) fail(ErrorCode::MissingFeature, std::string(name));
  if (it->second.kind != 0 && it->second.kind != kind) fail(ErrorCode::WrongType, std::string(name));
  return it->second;
}

std::vector<float> decode_floats(const FeatureView& f, std::string_view name) {
  std::vector<float> out;
  WireReader r(f.list);
  while (!r.done()) {
    auto [field, wt] = r.tag();
    if (field != 1) {
      r.skip(wt);
    } else if (wt == kLengthDelimited) {
      auto packed = r.length_delimited();
      if (packed.size() % 4 != 0) fail(ErrorCode::MalformedProto, std::string(name) + " packed floats");
      for (std::size_t i = 0; i < packed.size(); i += 4) out.push_back(le::get_f32(packed.data() + i));
    } else if (wt == kFixed32) {
      out.push_back(le::get_f32(r.bytes(4).data()));
    } else {
      fail(ErrorCode::WrongType, std::string(name));
    }
  }
  return out;
}

std::vector<std::int64_t> decode_int64s(const FeatureView& f, std::string_view name) {
  std::vector<std::int64_t> out;
  WireReader r(f.list);
  while (!r.done()) {
    auto [field, wt] = r.tag();
    if (field != 1) {
      r.skip(wt);
    } else if (wt == kLengthDelimited) {
      WireReader packed(r.length_delimited());
      while (!packed.done()) out.push_back(static_cast<std::int64_t>(packed.varint()));
    } else if (wt == kVarint) {
      out.push_back(static_cast<std::int64_t>(r.varint()));
    } else {
      fail(ErrorCode::WrongType, std::string(name));
    }
  }
  return out;
}

std::vector<std::string_view> decode_bytes(const FeatureView& f, std::string_view name) {
  std::vector<std::string_view> out;
  WireReader r(f.list);
  while (!r.done()) {
    auto [field, wt] = r.tag();
    if (field != 1) {
      r.skip(wt);
    } else if (wt == kLengthDelimited) {
      out.push_back(r.length_delimited());
    } else {
      fail(ErrorCode::WrongType, std::string(name));
    }
  }
  return out;
}

}  // namespace

std::string encode_video_example(const Example& ex) {
  std::string features;
  put_entry(features, "video_id", bytes_feature(ex.video_id));
  put_entry(features, "labels", int64_feature(ex.labels));
  put_entry(features, "mean_rgb", float_feature(ex.features.rgb));
  put_entry(features, "mean_audio", float_feature(ex.features.audio));
  std::string example;
  put_len(example, 1, features);
  return example;
}

Example decode_video_example(std::string_view payload, const Schema& schema) {
  const auto features = parse_features(payload);

  Example ex;
  const auto ids = decode_bytes(require(features, "video_id", 1), "video_id");
  if (ids.size() != 1) {
    fail(ErrorCode::WrongType, "video_id holds " + std::to_string(ids.size()) + " values");
  }
  ex.video_id = std::string(ids.front());

  for (std::int64_t label : decode_int64s(require(features, "labels", 3), "labels")) {
    if (label < 0 || label > std::numeric_limits<ClassIndex>::max()) {
      fail(ErrorCode::LabelOutOfRange, std::to_string(label));
    }
    ex.labels.push_back(static_cast<ClassIndex>(label));
  }
  ex.features.rgb = decode_floats(require(features, "mean_rgb", 2), "mean_rgb");
  ex.features.audio = decode_floats(require(features, "mean_audio", 2), "mean_audio");

  canonicalize_labels(ex);
  validate_example(ex, schema);
  return ex;
}

}  // namespace yt8m
