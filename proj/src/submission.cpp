#include "yt8m/submission.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "yt8m/error.hpp"

namespace yt8m {

namespace {
constexpr std::size_t kFlushBytes = 1 << 20;

bool is_blank(char c) noexcept { return c == ' ' || c == '\t'; }
}  // namespace

std::string format_confidence(double v, ConfidenceFormat format) {
  char buf[64];
  if (format == ConfidenceFormat::round_trip) {
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  }
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
  std::string_view s(buf, static_cast<std::size_t>(res.ptr - buf));
  if (s.find('.') != std::string_view::npos) {
    while (s.back() == '0') s.remove_suffix(1);
    if (s.back() == '.') s.remove_suffix(1);
  }
  if (s == "-0") s = "0";
  return std::string(s);
}

std::string format_row(const PredictionList& list, ConfidenceFormat format) {
  std::string row = list.video_id();
  row.push_back(',');
  bool first = true;
  for (const auto& p : list.pairs()) {
    if (!first) row.push_back(' ');
    first = false;
    row += std::to_string(p.label);
    row.push_back(' ');
    row += format_confidence(p.confidence, format);
  }
  return row;
}

SubmissionWriter::SubmissionWriter(const std::filesystem::path& path, ConfidenceFormat format)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), format_(format) {
  if (!out_) fail(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  buffer_.append(kSubmissionHeader);
  buffer_.push_back('\n');
}

SubmissionWriter::~SubmissionWriter() {
  if (!closed_) {
    try {
      close();
    } catch (...) {
    }
  }
}

void SubmissionWriter::write(const PredictionList& list) {
  if (!seen_.insert(list.video_id()).second) fail(ErrorCode::DuplicateVideo, list.video_id());
  buffer_ += format_row(list, format_);
  buffer_.push_back('\n');
  ++rows_;
  if (buffer_.size() >= kFlushBytes) flush_buffer();
}

void SubmissionWriter::flush_buffer() {
  out_.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
  buffer_.clear();
  if (!out_) fail(ErrorCode::Io, "write failed on " + path_.string());
}

std::size_t SubmissionWriter::close() {
  if (closed_) return rows_;
  closed_ = true;
  flush_buffer();
  out_.flush();
  if (!out_) fail(ErrorCode::Io, "flush failed on " + path_.string());
  out_.close();
  return rows_;
}

SubmissionReader::SubmissionReader(const std::filesystem::path& path,
                                   std::optional<std::size_t> num_classes)
    : path_(path), in_(path, std::ios::binary), num_classes_(num_classes) {
  if (!in_) fail(ErrorCode::Io, "cannot open " + path.string());
  std::string header;
  if (!std::getline(in_, header)) {
    if (in_.bad()) fail(ErrorCode::Io, "read failed on " + path.string());
    fail(ErrorCode::BadHeader, "");
  }
  line_ = 1;
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header != kSubmissionHeader) fail(ErrorCode::BadHeader, header);
}

std::optional<PredictionList> SubmissionReader::next() {
  if (!std::getline(in_, buf_)) {
    if (in_.bad()) fail(ErrorCode::Io, "read failed on " + path_.string());
    return std::nullopt;
  }
  ++line_;
  std::string_view row(buf_);
  if (!row.empty() && row.back() == '\r') row.remove_suffix(1);
  return parse_row(row);
}

PredictionList SubmissionReader::parse_row(std::string_view row) {
  const std::string where = "line " + std::to_string(line_);
  const auto comma = row.find(',');
  if (comma == std::string_view::npos) fail(ErrorCode::MalformedRow, where + ": no comma");
  const std::string_view id = row.substr(0, comma);
  if (id.empty()) fail(ErrorCode::EmptyVideoId, where);
  if (!valid_video_id(id)) fail(ErrorCode::BadVideoId, where + ": '" + std::string(id) + "'");

  pairs_.clear();
  const char* p = row.data() + comma + 1;
  const char* end = row.data() + row.size();
  std::size_t tokens = 0;
  LabelConfidence pending;
  while (true) {
    while (p < end && is_blank(*p)) ++p;
    if (p == end) break;
    const char* start = p;
    while (p < end && !is_blank(*p)) ++p;
    const std::string_view token(start, static_cast<std::size_t>(p - start));
    if (tokens % 2 == 0) {
      ClassIndex label = 0;
      const auto res = std::from_chars(token.data(), token.data() + token.size(), label);
      if (res.ec != std::errc() || res.ptr != token.data() + token.size() || label < 0) {
        fail(ErrorCode::BadNumber, where + ", token '" + std::string(token) + "'");
      }
      if (num_classes_ && static_cast<std::size_t>(label) >= *num_classes_) {
        fail(ErrorCode::LabelOutOfRange, where + ": " + std::to_string(label));
      }
      pending.label = label;
    } else {
      double conf = 0.0;
      const auto res = std::from_chars(token.data(), token.data() + token.size(), conf);
      if (res.ec != std::errc() || res.ptr != token.data() + token.size() || !std::isfinite(conf)) {
        fail(ErrorCode::BadNumber, where + ", token '" + std::string(token) + "'");
      }
      pending.confidence = conf;
      pairs_.push_back(pending);
    }
    ++tokens;
  }
  if (tokens % 2 != 0) fail(ErrorCode::OddTokenCount, where);

  try {
    PredictionList list{std::string(id), pairs_};
    if (!seen_.insert(list.video_id()).second) fail(ErrorCode::DuplicateVideo, list.video_id());
    return list;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DuplicateLabel) fail(ErrorCode::DuplicateLabel, where);
    throw;
  }
}

std::size_t write_submission(std::span<const PredictionList> lists,
                             const std::filesystem::path& path, ConfidenceFormat format) {
  SubmissionWriter writer(path, format);
  for (const auto& list : lists) writer.write(list);
  return writer.close();
}

std::vector<PredictionList> parse_submission(const std::filesystem::path& path,
                                             std::optional<std::size_t> num_classes) {
  SubmissionReader reader(path, num_classes);
  std::vector<PredictionList> out;
  while (auto list = reader.next()) out.push_back(std::move(*list));
  return out;
}

}  // namespace yt8m
