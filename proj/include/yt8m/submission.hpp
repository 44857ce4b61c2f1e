#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "yt8m/datamodel.hpp"

namespace yt8m {

inline constexpr std::string_view kSubmissionHeader = "VideoId,LabelConfidencePairs";

/// How confidences are printed: the shortest decimal that round-trips the
/// double, or rounded to at most six fractional digits.
enum class ConfidenceFormat { round_trip, six_digits };

std::string format_confidence(double v, ConfidenceFormat format);
/// "<video_id>,<label> <conf> <label> <conf> ..." without the line ending.
std::string format_row(const PredictionList& list, ConfidenceFormat format);

/// Streams rows to disk: header first, LF line endings, one row per video.
class SubmissionWriter {
 public:
  SubmissionWriter(const std::filesystem::path& path,
                   ConfidenceFormat format = ConfidenceFormat::round_trip);
  ~SubmissionWriter();
  SubmissionWriter(const SubmissionWriter&) = delete;
  SubmissionWriter& operator=(const SubmissionWriter&) = delete;

  /// Errors: DuplicateVideo(id), Io.
  void write(const PredictionList& list);
  /// Flushes; returns the number of prediction rows written.
  std::size_t close();

 private:
  void flush_buffer();

  std::filesystem::path path_;
  std::ofstream out_;
  ConfidenceFormat format_;
  std::string buffer_;
  std::unordered_set<std::string> seen_;
  std::size_t rows_ = 0;
  bool closed_ = false;
};

/// Single-pass strict parser. Validates the header, then yields one list per
/// row in file order. Accepts CRLF. Errors: BadHeader(got), MalformedRow(line),
/// OddTokenCount(line), BadNumber(line, token), DuplicateLabel(line),
/// DuplicateVideo(id), LabelOutOfRange (when num_classes is given), Io.
class SubmissionReader {
 public:
  explicit SubmissionReader(const std::filesystem::path& path,
                            std::optional<std::size_t> num_classes = std::nullopt);

  std::optional<PredictionList> next();
  std::size_t line() const noexcept { return line_; }

 private:
  PredictionList parse_row(std::string_view row);

  std::filesystem::path path_;
  std::ifstream in_;
  std::optional<std::size_t> num_classes_;
  std::string buf_;
  std::unordered_set<std::string> seen_;
  std::size_t line_ = 0;
  std::vector<LabelConfidence> pairs_;
};

std::size_t write_submission(std::span<const PredictionList> lists,
                             const std::filesystem::path& path,
                             ConfidenceFormat format = ConfidenceFormat::round_trip);
std::vector<PredictionList> parse_submission(const std::filesystem::path& path,
                                             std::optional<std::size_t> num_classes = std::nullopt);

}  // namespace yt8m
