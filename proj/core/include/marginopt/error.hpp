#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace marginopt {

enum class ErrorCode {
  kInvalidArgument,
  kPoleEvaluation,
  kImproper,
  kSingularLoop,
  kDegreeLimit,
  kBadInterval,
  kForbiddenValue,
  kOutsideDisk,
  kDuplicateNode,
  kInfeasible,
  kDegenerate,
  kNominalUnstable,
  kNegativeFeedthrough,
  kRateTooSlow,
  kImproperEntry,
  kHigherOrderPole,
  kSingularTransform,
  kUncertifiable,
  kInnerNotConverged,
  kTooShort,
  kDivergence,
  kFactorizationFailure,
  kNotStrictlyCausal,
};

std::string_view to_string(ErrorCode code);

// Numerical failures (as opposed to bad input) map to exit code 2 in the CLI.
bool is_numerical_failure(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace marginopt
