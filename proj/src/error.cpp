#include "yt8m/error.hpp"

namespace yt8m {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::BadDimension: return "BadDimension";
    case ErrorCode::EmptyVideoId: return "EmptyVideoId";
    case ErrorCode::BadVideoId: return "BadVideoId";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::CrcMismatch: return "CrcMismatch";
    case ErrorCode::TruncatedRecord: return "TruncatedRecord";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::MissingFeature: return "MissingFeature";
    case ErrorCode::WrongType: return "WrongType";
    case ErrorCode::MalformedProto: return "MalformedProto";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NoCachedForward: return "NoCachedForward";
    case ErrorCode::UnknownArchitecture: return "UnknownArchitecture";
    case ErrorCode::BadSpec: return "BadSpec";
    case ErrorCode::EmptyLabelRow: return "EmptyLabelRow";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::BadCheckpoint: return "BadCheckpoint";
    case ErrorCode::UnknownVideo: return "UnknownVideo";
    case ErrorCode::DuplicatePrediction: return "DuplicatePrediction";
    case ErrorCode::BadHeader: return "BadHeader";
    case ErrorCode::OddTokenCount: return "OddTokenCount";
    case ErrorCode::BadNumber: return "BadNumber";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::DuplicateVideo: return "DuplicateVideo";
    case ErrorCode::Usage: return "Usage";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

void fail(ErrorCode code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace yt8m
