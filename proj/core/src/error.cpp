#include "marginopt/error.hpp"

namespace marginopt {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kPoleEvaluation: return "PoleEvaluation";
    case ErrorCode::kImproper: return "Improper";
    case ErrorCode::kSingularLoop: return "SingularLoop";
    case ErrorCode::kDegreeLimit: return "DegreeLimit";
    case ErrorCode::kBadInterval: return "BadInterval";
    case ErrorCode::kForbiddenValue: return "ForbiddenValue";
    case ErrorCode::kOutsideDisk: return "OutsideDisk";
    case ErrorCode::kDuplicateNode: return "DuplicateNode";
    case ErrorCode::kInfeasible: return "Infeasible";
    case ErrorCode::kDegenerate: return "Degenerate";
    case ErrorCode::kNominalUnstable: return "NominalUnstable";
    case ErrorCode::kNegativeFeedthrough: return "NegativeFeedthrough";
    case ErrorCode::kRateTooSlow: return "RateTooSlow";
    case ErrorCode::kImproperEntry: return "ImproperEntry";
    case ErrorCode::kHigherOrderPole: return "HigherOrderPole";
    case ErrorCode::kSingularTransform: return "SingularTransform";
    case ErrorCode::kUncertifiable: return "Uncertifiable";
    case ErrorCode::kInnerNotConverged: return "InnerNotConverged";
    case ErrorCode::kTooShort: return "TooShort";
    case ErrorCode::kDivergence: return "Divergence";
    case ErrorCode::kFactorizationFailure: return "FactorizationFailure";
    case ErrorCode::kNotStrictlyCausal: return "NotStrictlyCausal";
  }
  return "Unknown";
}

bool is_numerical_failure(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDivergence:
    case ErrorCode::kInfeasible:
    case ErrorCode::kInnerNotConverged:
    case ErrorCode::kFactorizationFailure:
    case ErrorCode::kUncertifiable:
    case ErrorCode::kSingularLoop:
    case ErrorCode::kSingularTransform:
    case ErrorCode::kNominalUnstable:
    case ErrorCode::kHigherOrderPole:
    case ErrorCode::kPoleEvaluation:
    case ErrorCode::kTooShort:
      return true;
    default:
      return false;
  }
}

}  // namespace marginopt
