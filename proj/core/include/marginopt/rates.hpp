#pragma once

#include <string>
#include <utility>

#include "marginopt/runtime.hpp"
#include "marginopt/synthesis.hpp"
#include "marginopt/transfer_function.hpp"

namespace marginopt {

struct RateEstimate {
  double rho_hat = 0.0;
  std::pair<long long, long long> window{0, 0};  // inclusive step indices
  std::string method = "ratio";
  double root_estimate = 0.0;
  bool flagged = false;  // ratio and root estimates differ by > 0.02
};

// Usable steps: |e[t]| >= 1e-12 |e[0]|. Needs 20 of them (TooShort).
// Geometric mean of successive ratios over the last quartile, cross-checked
// against (|e[T]|/|e[0]|)^(1/T).
RateEstimate empirical_rate(const Trace& trace);
RateEstimate empirical_rate(const std::vector<double>& err_norm);

// Largest root modulus of the closed loop with scalar gain lambda.
double spectral_rate(const TransferFunction& G, double lambda);

inline constexpr int kDefaultRateGrid = 129;
inline constexpr double kRateJump = 0.05;
inline constexpr int kMaxRateSamples = 1 << 16;

// spectral_rate sampled on a log grid over [mu, ell] (endpoints included),
// refined by bisection until neighbouring rates differ by less than
// kRateJump or the sample cap is reached. lambda is increasing.
struct RateProfile {
  std::vector<double> lambda;
  std::vector<double> rate;
};
RateProfile rate_profile(const TransferFunction& G, const RateBudget& budget,
                         int grid = kDefaultRateGrid);

// Maximum of rate_profile, then golden section around the best sample down
// to 1e-8 in lambda.
double worst_case_rate(const TransferFunction& G, const RateBudget& budget,
                       int grid = kDefaultRateGrid);

}  // namespace marginopt
