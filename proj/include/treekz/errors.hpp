#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace treekz {

enum class ErrorCode {
  DimensionMismatch,
  NotSquare,
  ConvergenceFailure,
  ZeroRow,
  NonFinite,
  CycleDetected,
  DisconnectedNode,
  WeightNotPositive,
  WeightsNotNormalized,
  UnknownNode,
  NotOnPath,
  MissingLeafEstimate,
  MissingEquation,
  NoTrace,
  SpectralRadiusAtLeastOne,
  Inconsistent,
  VariantUnsupported,
  TooLarge,
  SizeMismatch,
  InvalidArgument,
  ParseError,
  ValidationError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct Violation {
  ErrorCode code;
  std::string message;
};

/// Thrown when a tree, system or problem file breaks one or more invariants.
/// Carries every violation found, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const noexcept { return violations_; }
  bool has(ErrorCode code) const noexcept;

 private:
  std::vector<Violation> violations_;
};

}  // namespace treekz
