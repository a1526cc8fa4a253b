#include "cadence/error.hpp"

namespace cadence {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::SplitTooSmall: return "SplitTooSmall";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::ChannelMismatch: return "ChannelMismatch";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::EmptyPairSet: return "EmptyPairSet";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DegeneratePointSet: return "DegeneratePointSet";
    case ErrorCode::InvalidWidth: return "InvalidWidth";
    case ErrorCode::EmptyScores: return "EmptyScores";
    case ErrorCode::NoPositives: return "NoPositives";
    case ErrorCode::NoNegatives: return "NoNegatives";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::UntrainedModel: return "UntrainedModel";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

}  // namespace cadence
