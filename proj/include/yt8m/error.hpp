#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace yt8m {

enum class ErrorCode {
  // datamodel
  LabelOutOfRange,
  BadDimension,
  EmptyVideoId,
  BadVideoId,
  DuplicateLabel,
  NonFiniteValue,
  // ingest
  CrcMismatch,
  TruncatedRecord,
  BadMagic,
  MissingFeature,
  WrongType,
  MalformedProto,
  InvalidConfig,
  // nncore / modelzoo / training
  ShapeMismatch,
  NoCachedForward,
  UnknownArchitecture,
  BadSpec,
  EmptyLabelRow,
  NonFiniteLoss,
  BadCheckpoint,
  // metrics / submission / ensemble
  UnknownVideo,
  DuplicatePrediction,
  BadHeader,
  OddTokenCount,
  BadNumber,
  MalformedRow,
  DuplicateVideo,
  Usage,
  // environment
  Io,
};

std::string_view error_code_name(ErrorCode code);

/// Every library failure is reported as a yt8m::Error. The CLI maps Io to
/// exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  bool is_io() const noexcept { return code_ == ErrorCode::Io; }

 private:
  ErrorCode code_;
  std::string detail_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& detail);

}  // namespace yt8m
