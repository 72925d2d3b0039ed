#include "treekz/errors.hpp"

#include <algorithm>

namespace treekz {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::ZeroRow: return "ZeroRow";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::CycleDetected: return "CycleDetected";
    case ErrorCode::DisconnectedNode: return "DisconnectedNode";
    case ErrorCode::WeightNotPositive: return "WeightNotPositive";
    case ErrorCode::WeightsNotNormalized: return "WeightsNotNormalized";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::NotOnPath: return "NotOnPath";
    case ErrorCode::MissingLeafEstimate: return "MissingLeafEstimate";
    case ErrorCode::MissingEquation: return "MissingEquation";
    case ErrorCode::NoTrace: return "NoTrace";
    case ErrorCode::SpectralRadiusAtLeastOne: return "SpectralRadiusAtLeastOne";
    case ErrorCode::Inconsistent: return "Inconsistent";
    case ErrorCode::VariantUnsupported: return "VariantUnsupported";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

namespace {

std::string join(const std::vector<Violation>& violations) {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += std::string(to_string(v.code)) + ": " + v.message;
  }
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(ErrorCode::ValidationError, join(violations)), violations_(std::move(violations)) {}

bool ValidationError::has(ErrorCode code) const noexcept {
  return std::any_of(violations_.begin(), violations_.end(),
                     [code](const Violation& v) { return v.code == code; });
}

}  // namespace treekz
