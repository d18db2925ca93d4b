#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace empcal {

enum class ErrorKind {
  InvalidConfig,
  InvalidArgument,
  NonConvergence,
  SeparationDetected,
  RankDeficient,
  DegenerateScore,
  AllOneArm,
  TooFewControls,
  InsufficientEffectSpread,
  OptimizationFailed,
  NonMonotonePredictive,
  EmptyInput,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (the
/// scenario runner in particular) can tally failures without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace empcal
