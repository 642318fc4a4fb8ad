#include "heatlands/errors.hpp"

namespace heatlands {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::Resource: return "Resource";
    case ErrorKind::NotStronglyElliptic: return "NotStronglyElliptic";
    case ErrorKind::NotCertified: return "NotCertified";
    case ErrorKind::AliasingRisk: return "AliasingRisk";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::BranchCut: return "BranchCut";
    case ErrorKind::TruncationOverflow: return "TruncationOverflow";
    case ErrorKind::OutsideChart: return "OutsideChart";
    case ErrorKind::ChartDegenerate: return "ChartDegenerate";
    case ErrorKind::EffectiveOrderViolation: return "EffectiveOrderViolation";
    case ErrorKind::SupportLeak: return "SupportLeak";
    case ErrorKind::TimeGridTooCoarse: return "TimeGridTooCoarse";
    case ErrorKind::Diverging: return "Diverging";
    case ErrorKind::LambdaTooSmall: return "LambdaTooSmall";
    case ErrorKind::BoundViolation: return "BoundViolation";
    case ErrorKind::ContinuityUnmeasured: return "ContinuityUnmeasured";
    case ErrorKind::StencilOverflow: return "StencilOverflow";
    case ErrorKind::InsufficientLevels: return "InsufficientLevels";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message, nlohmann::json detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      detail_(std::move(detail)) {}

}  // namespace heatlands
