#include "empcal/errors.hpp"

namespace empcal {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::SeparationDetected: return "SeparationDetected";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::DegenerateScore: return "DegenerateScore";
    case ErrorKind::AllOneArm: return "AllOneArm";
    case ErrorKind::TooFewControls: return "TooFewControls";
    case ErrorKind::InsufficientEffectSpread: return "InsufficientEffectSpread";
    case ErrorKind::OptimizationFailed: return "OptimizationFailed";
    case ErrorKind::NonMonotonePredictive: return "NonMonotonePredictive";
    case ErrorKind::EmptyInput: return "EmptyInput";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace empcal
