#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "marginopt/state_space.hpp"
#include "marginopt/transfer_matrix.hpp"

namespace marginopt {

// Strong-convexity / smoothness pair. ell may be absent (mu-only class), which
// is a distinct variant rather than a large number.
class RateBudget {
 public:
  static RateBudget finite(double mu, double ell);
  static RateBudget mu_only(double mu);

  double mu() const { return mu_; }
  bool has_ell() const { return ell_.has_value(); }
  // Throws InvalidArgument for the mu-only variant.
  double ell() const;
  double kappa() const;

 private:
  RateBudget(double mu, std::optional<double> ell) : mu_(mu), ell_(ell) {}
  double mu_;
  std::optional<double> ell_;
};

// Named closed-form update with its scalar coefficients, in a fixed order.
struct IterationForm {
  std::string name;
  std::string update;  // human-readable update rule
  std::vector<std::pair<std::string, double>> coefficients;

  double coefficient(const std::string& key) const;  // throws if absent
};

struct AlgorithmSpec {
  std::string name;
  std::variant<TransferFunction, TransferMatrix> G;
  // G(infinity): 1x1 for scalar algorithms, 2x2 for the splitting method.
  Eigen::MatrixXd feedthrough;
  StateSpace realization;
  std::optional<IterationForm> iteration;
  double certified_rate = 1.0;
  std::string rate_class;          // "quadratic" or "sector"
  std::vector<std::string> flags;  // soft conditions met during synthesis

  bool is_scalar() const { return std::holds_alternative<TransferFunction>(G); }
  const TransferFunction& scalar_G() const;  // throws for matrix specs
  const TransferMatrix& matrix_G() const;    // throws for scalar specs
  double delta() const { return feedthrough(0, 0); }
  bool has_flag(const std::string& flag) const;
};

// A computed coefficient together with whether it was clamped to 0.
struct Clamped {
  double value;
  bool clamped;
};

double rho_min(const RateBudget& budget);
double rho_gd(const RateBudget& budget);

// alpha/(z-1).
AlgorithmSpec gradient_descent(const RateBudget& budget, double alpha);
// Step 2/(mu+ell); rate rho_gd for both quadratic and sector classes.
AlgorithmSpec optimal_gradient_descent(const RateBudget& budget);

// mu == ell returns gradient descent with step 1/ell, flagged
// "degenerate_budget".
AlgorithmSpec heavy_ball(const RateBudget& budget);

// Throws NegativeFeedthrough for delta < 0.
double implicit_rate_bound(double delta, const RateBudget& budget);
Clamped delta_for_rate(double rho, const RateBudget& budget);

// rho > rho_min returns heavy_ball flagged "rate_too_slow".
AlgorithmSpec implicit_heavy_ball(const RateBudget& budget, double rho);

struct IllConditionedPlan {
  double delta_max;
  double rho_m;
  bool newton_regime;  // kappa_m > kappa
};
IllConditionedPlan ill_conditioned_plan(const RateBudget& budget,
                                        double kappa_m);

// Circle-criterion rate of the implicit gradient method with feedthrough
// alpha, and its inverse (clamped at 0). Both accept the mu-only budget.
double rho_circle(double alpha, const RateBudget& budget);
Clamped alpha_for_rate(double rho, const RateBudget& budget);

// Throws RateTooSlow if rho > rho_gd (finite ell) or rho >= 1.
AlgorithmSpec implicit_gd(const RateBudget& budget, double rho);

// Condition number (1 + alpha ell)/(1 + alpha mu) of the prox sub-problem.
double sub_condition(double alpha, const RateBudget& budget);

struct SplittingData {
  double eta1;
  double eta2;
  double w_squared;
  TransferMatrix Psi;
};
// The interpolating Psi and scaling for the proximal-gradient splitting.
SplittingData splitting_data(const RateBudget& budget);
// eta2 inside [1/ell, 1/mu].
bool splitting_eta2_admissible(double eta2, const RateBudget& budget);
// mu == ell falls back to eta2 = 1/ell with flag "degenerate_budget".
AlgorithmSpec splitting_synthesis(const RateBudget& budget);

}  // namespace marginopt
