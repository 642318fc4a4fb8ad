#pragma once

#include <stdexcept>
#include <string>

#include "json.hpp"

namespace heatlands {

enum class ErrorKind {
  InvalidArgument,
  ParseError,
  Resource,
  NotStronglyElliptic,
  NotCertified,
  AliasingRisk,
  GridMismatch,
  DegenerateFit,
  BranchCut,
  TruncationOverflow,
  OutsideChart,
  ChartDegenerate,
  EffectiveOrderViolation,
  SupportLeak,
  TimeGridTooCoarse,
  Diverging,
  LambdaTooSmall,
  BoundViolation,
  ContinuityUnmeasured,
  StencilOverflow,
  InsufficientLevels,
};

const char* to_string(ErrorKind kind);

// Every library failure is an Error; `detail` carries structured context
// (witness directions, required grid sizes, offending coefficients).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, nlohmann::json detail = {});

  ErrorKind kind() const { return kind_; }
  const nlohmann::json& detail() const { return detail_; }

 private:
  ErrorKind kind_;
  nlohmann::json detail_;
};

}  // namespace heatlands
