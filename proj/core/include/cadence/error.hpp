#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cadence {

enum class ErrorCode {
  // data / ingestion
  MalformedRow,
  LabelOutOfRange,
  EmptySeries,
  SplitTooSmall,
  SeriesTooShort,
  ChannelMismatch,
  IoFailure,
  VersionMismatch,
  ChecksumMismatch,
  // numerics
  EmptyPairSet,
  DimensionMismatch,
  ShapeMismatch,
  DegeneratePointSet,
  InvalidWidth,
  EmptyScores,
  NoPositives,
  NoNegatives,
  // model / training
  EmptyTrainingSet,
  UntrainedModel,
  // configuration
  InvalidConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cadence
