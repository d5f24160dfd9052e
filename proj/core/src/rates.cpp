#include "marginopt/rates.hpp"

#include <algorithm>
#include <cmath>

#include "marginopt/error.hpp"

namespace marginopt {

RateEstimate empirical_rate(const Trace& trace) {
  return empirical_rate(trace.err_norm);
}

RateEstimate empirical_rate(const std::vector<double>& e) {
  if (e.empty() || !(e[0] > 0.0)) {
    throw Error(ErrorCode::kTooShort, "trace has no nonzero initial error");
  }
  const double floor = 1e-12 * e[0];
  size_t usable = 0;
  while (usable < e.size() && e[usable] >= floor && e[usable] > 0.0) ++usable;
  if (usable < 20) {
    throw Error(ErrorCode::kTooShort,
                "only " + std::to_string(usable) + " usable steps, need 20");
  }
  const size_t last = usable - 1;
  const size_t start = last - std::max<size_t>(1, usable / 4);
  RateEstimate out;
  out.window = {static_cast<long long>(start), static_cast<long long>(last)};
  out.rho_hat = std::exp(std::log(e[last] / e[start]) /
                         static_cast<double>(last - start));
  out.root_estimate = std::exp(std::log(e[last] / e[0]) / static_cast<double>(last));
  out.flagged = std::abs(out.rho_hat - out.root_estimate) > 0.02;
  return out;
}

double spectral_rate(const TransferFunction& G, double lambda) {
  if (!(lambda > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda must be positive");
  }
  return spectral_radius(closed_loop_charpoly(G, lambda));
}

RateProfile rate_profile(const TransferFunction& G, const RateBudget& budget,
                         int grid) {
  if (grid < 3) throw Error(ErrorCode::kInvalidArgument, "grid needs >= 3 points");
  const double mu = budget.mu(), ell = budget.ell();
  RateProfile p;
  if (mu == ell) {
    p.lambda = {mu};
    p.rate = {spectral_rate(G, mu)};
    return p;
  }
  const double lmu = std::log(mu), lell = std::log(ell);
  std::vector<double> lam(grid), val(grid);
  for (int i = 0; i < grid; ++i) {
    lam[i] = i == 0 ? mu : i == grid - 1 ? ell
                         : std::exp(lmu + (lell - lmu) * i / (grid - 1));
    val[i] = spectral_rate(G, lam[i]);
  }
  // bisect (in log lambda) wherever neighbours jump by kRateJump or more
  p.lambda.push_back(lam[0]);
  p.rate.push_back(val[0]);
  for (int i = 1; i < grid; ++i) {
    std::vector<std::pair<double, double>> stack{{lam[i], val[i]}};
    while (!stack.empty()) {
      const auto [l, v] = stack.back();
      const double l0 = p.lambda.back(), v0 = p.rate.back();
      const bool room = std::log(l / l0) > 1e-9 &&
                        static_cast<int>(p.lambda.size() + stack.size()) < kMaxRateSamples;
      if (std::abs(v - v0) >= kRateJump && room) {
        const double mid = std::sqrt(l0 * l);
        stack.push_back({mid, spectral_rate(G, mid)});
        continue;
      }
      p.lambda.push_back(l);
      p.rate.push_back(v);
      stack.pop_back();
    }
  }
  return p;
}

double worst_case_rate(const TransferFunction& G, const RateBudget& budget,
                       int grid) {
  const RateProfile p = rate_profile(G, budget, grid);
  const int n = static_cast<int>(p.lambda.size());
  if (n == 1) return p.rate[0];
  int best = 0;
  for (int i = 1; i < n; ++i) {
    if (p.rate[i] > p.rate[best]) best = i;
  }
  double a = p.lambda[std::max(0, best - 1)], b = p.lambda[std::min(n - 1, best + 1)];
  const double result = p.rate[best];
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = spectral_rate(G, c), fd = spectral_rate(G, d);
  while (b - a > 1e-8) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - r * (b - a);
      fc = spectral_rate(G, c);
    } else {
      a = c; c = d; fc = fd;
      d = a + r * (b - a);
      fd = spectral_rate(G, d);
    }
  }
  return std::max({result, fc, fd});
}

}  // namespace marginopt
