#include "marginopt/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "marginopt/error.hpp"

namespace marginopt {
namespace {

TransferFunction accumulator_tf(Polynomial num, Polynomial extra_den) {
  return TransferFunction(std::move(num), Polynomial({-1.0, 1.0}) * extra_den);
}

AlgorithmSpec make_scalar(std::string name, TransferFunction G,
                          IterationForm form, double rate,
                          std::string rate_class) {
  AlgorithmSpec spec;
  spec.name = std::move(name);
  spec.feedthrough = Eigen::MatrixXd::Constant(1, 1, feedthrough(G));
  spec.realization = realize(G);
  spec.G = std::move(G);
  spec.iteration = std::move(form);
  spec.certified_rate = rate;
  spec.rate_class = std::move(rate_class);
  return spec;
}

void require_finite(const RateBudget& budget, const char* what) {
  if (!budget.has_ell()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " needs a finite smoothness constant");
  }
}

void require_rate(double rho) {
  if (!(rho > 0.0) || !(rho < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "rate must lie in (0, 1)");
  }
}

}  // namespace

RateBudget RateBudget::finite(double mu, double ell) {
  if (!(mu > 0.0) || !std::isfinite(mu) || !std::isfinite(ell) || !(ell >= mu)) {
    throw Error(ErrorCode::kInvalidArgument, "budget needs 0 < mu <= ell < inf");
  }
  return RateBudget(mu, ell);
}

RateBudget RateBudget::mu_only(double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    throw Error(ErrorCode::kInvalidArgument, "budget needs 0 < mu < inf");
  }
  return RateBudget(mu, std::nullopt);
}

double RateBudget::ell() const {
  if (!ell_) {
    throw Error(ErrorCode::kInvalidArgument, "budget has no smoothness constant");
  }
  return *ell_;
}

double RateBudget::kappa() const {
  return ell_ ? *ell_ / mu_ : std::numeric_limits<double>::infinity();
}

double IterationForm::coefficient(const std::string& key) const {
  for (const auto& [k, v] : coefficients) {
    if (k == key) return v;
  }
  throw Error(ErrorCode::kInvalidArgument, "no coefficient named " + key);
}

const TransferFunction& AlgorithmSpec::scalar_G() const {
  if (!is_scalar()) {
    throw Error(ErrorCode::kInvalidArgument, name + " has a matrix transfer function");
  }
  return std::get<TransferFunction>(G);
}

const TransferMatrix& AlgorithmSpec::matrix_G() const {
  if (is_scalar()) {
    throw Error(ErrorCode::kInvalidArgument, name + " has a scalar transfer function");
  }
  return std::get<TransferMatrix>(G);
}

bool AlgorithmSpec::has_flag(const std::string& flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

double rho_min(const RateBudget& budget) {
  require_finite(budget, "rho_min");
  const double s = std::sqrt(budget.kappa());
  return (s - 1.0) / (s + 1.0);
}

double rho_gd(const RateBudget& budget) {
  require_finite(budget, "rho_gd");
  const double k = budget.kappa();
  return (k - 1.0) / (k + 1.0);
}

AlgorithmSpec gradient_descent(const RateBudget& budget, double alpha) {
  require_finite(budget, "gradient_descent");
  if (!(alpha > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "step must be positive");
  }
  const double rate = std::max(std::abs(1.0 - alpha * budget.mu()),
                               std::abs(1.0 - alpha * budget.ell()));
  IterationForm form{"gradient_descent", "x+ = x - alpha grad f(x)",
                     {{"step", alpha}}};
  return make_scalar("gradient_descent",
                     accumulator_tf(Polynomial::constant(alpha),
                                    Polynomial::constant(1.0)),
                     std::move(form), rate, "quadratic");
}

AlgorithmSpec optimal_gradient_descent(const RateBudget& budget) {
  require_finite(budget, "optimal_gradient_descent");
  AlgorithmSpec spec =
      gradient_descent(budget, 2.0 / (budget.mu() + budget.ell()));
  spec.name = "optimal_gradient_descent";
  spec.certified_rate = rho_gd(budget);
  spec.rate_class = "sector";
  return spec;
}

AlgorithmSpec heavy_ball(const RateBudget& budget) {
  require_finite(budget, "heavy_ball");
  const double mu = budget.mu(), ell = budget.ell();
  if (ell == mu) {
    AlgorithmSpec spec = gradient_descent(budget, 1.0 / ell);
    spec.name = "heavy_ball";
    spec.certified_rate = 0.0;
    spec.flags.push_back("degenerate_budget");
    return spec;
  }
  const double rho = rho_min(budget);
  const double sum = std::sqrt(ell) + std::sqrt(mu);
  const double step = 4.0 / (sum * sum);
  const double momentum = rho * rho;
  IterationForm form{"heavy_ball",
                     "x+ = x + momentum (x - x-) - step grad f(x)",
                     {{"momentum", momentum}, {"step", step}}};
  return make_scalar(
      "heavy_ball",
      accumulator_tf(Polynomial({0.0, 4.0 * rho / (ell - mu)}),
                     Polynomial({-momentum, 1.0})),
      std::move(form), rho, "quadratic");
}

double implicit_rate_bound(double delta, const RateBudget& budget) {
  require_finite(budget, "implicit_rate_bound");
  if (delta < 0.0) {
    throw Error(ErrorCode::kNegativeFeedthrough, "feedthrough must be >= 0");
  }
  if (std::isinf(delta)) return 0.0;
  const double ld = budget.ell() * delta;
  const double a = std::sqrt(budget.kappa() + ld);
  const double b = std::sqrt(1.0 + ld);
  return (a - b) / (a + b);
}

Clamped delta_for_rate(double rho, const RateBudget& budget) {
  require_finite(budget, "delta_for_rate");
  require_rate(rho);
  const double k = budget.kappa();
  const double d = ((1.0 - rho) * (1.0 - rho) * k - (1.0 + rho) * (1.0 + rho)) /
                   (4.0 * rho * budget.ell());
  if (d < 0.0) return {0.0, true};
  return {d, false};
}

AlgorithmSpec implicit_heavy_ball(const RateBudget& budget, double rho) {
  require_finite(budget, "implicit_heavy_ball");
  require_rate(rho);
  if (rho > rho_min(budget)) {
    AlgorithmSpec spec = heavy_ball(budget);
    spec.flags.push_back("rate_too_slow");
    return spec;
  }
  const double mu = budget.mu(), ell = budget.ell();
  const double delta = delta_for_rate(rho, budget).value;
  const double root_sum =
      std::sqrt(ell + mu * ell * delta) + std::sqrt(mu + mu * ell * delta);
  const double beta = (4.0 + 2.0 * delta * (ell + mu)) / (root_sum * root_sum);
  const double r2 = rho * rho;
  IterationForm form{
      "implicit_heavy_ball",
      "x+ = x + momentum (x - x-) - gain (I + regularizer Q)^-1 grad f(x)",
      {{"momentum", r2},
       {"gain", delta + delta * r2 + beta},
       {"regularizer", delta},
       {"beta", beta}}};
  return make_scalar(
      "implicit_heavy_ball",
      accumulator_tf(Polynomial({delta * r2, beta, delta}),
                     Polynomial({-r2, 1.0})),
      std::move(form), rho, "quadratic");
}

IllConditionedPlan ill_conditioned_plan(const RateBudget& budget,
                                        double kappa_m) {
  require_finite(budget, "ill_conditioned_plan");
  if (!(kappa_m >= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "kappa_m must be >= 1");
  }
  const double k = budget.kappa();
  const double inf = std::numeric_limits<double>::infinity();
  if (kappa_m > k) return {inf, 0.0, true};
  const double delta_max =
      kappa_m == k ? inf : (kappa_m - 1.0) / (budget.mu() * (k - kappa_m));
  const double s = std::sqrt(k / kappa_m);
  return {delta_max, std::max(0.0, (s - 1.0) / (s + 1.0)), false};
}

double rho_circle(double alpha, const RateBudget& budget) {
  if (!(alpha >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must be >= 0");
  }
  if (!budget.has_ell()) return 1.0 / (1.0 + 2.0 * budget.mu() * alpha);
  const double k = budget.kappa();
  return (k - 1.0) / (k + 1.0 + 2.0 * budget.ell() * alpha);
}

Clamped alpha_for_rate(double rho, const RateBudget& budget) {
  require_rate(rho);
  double a;
  if (!budget.has_ell()) {
    a = (1.0 - rho) / (2.0 * rho * budget.mu());
  } else {
    const double k = budget.kappa();
    a = ((1.0 - rho) * k - (1.0 + rho)) / (2.0 * rho * budget.ell());
  }
  if (a < 0.0) return {0.0, true};
  return {a, false};
}

AlgorithmSpec implicit_gd(const RateBudget& budget, double rho) {
  require_rate(rho);
  const double mu = budget.mu();
  if (!budget.has_ell()) {
    const double alpha = alpha_for_rate(rho, budget).value;
    IterationForm form{"implicit_proximal",
                       "x+ = prox_{alpha f}(x - beta grad f(x))",
                       {{"alpha", alpha}, {"beta", alpha * rho}}};
    return make_scalar("implicit_gd_mu_only",
                       accumulator_tf(Polynomial({alpha * rho, alpha}),
                                      Polynomial::constant(1.0)),
                       std::move(form), rho, "sector");
  }
  if (rho > rho_gd(budget)) {
    throw Error(ErrorCode::kRateTooSlow,
                "rate slower than gradient descent needs no feedthrough");
  }
  const double ell = budget.ell();
  const double alpha = alpha_for_rate(rho, budget).value;
  const double beta =
      (2.0 + alpha * (ell + mu)) / (ell + mu + 2.0 * mu * ell * alpha);
  IterationForm form{"implicit_proximal",
                     "x+ = prox_{alpha f}(x - beta grad f(x))",
                     {{"alpha", alpha}, {"beta", beta}}};
  return make_scalar("implicit_gd",
                     accumulator_tf(Polynomial({beta, alpha}),
                                    Polynomial::constant(1.0)),
                     std::move(form), rho, "sector");
}

double sub_condition(double alpha, const RateBudget& budget) {
  require_finite(budget, "sub_condition");
  if (!(alpha >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "alpha must be >= 0");
  }
  if (std::isinf(alpha)) return budget.kappa();
  return (1.0 + alpha * budget.ell()) / (1.0 + alpha * budget.mu());
}

SplittingData splitting_data(const RateBudget& budget) {
  require_finite(budget, "splitting_data");
  const double mu = budget.mu(), ell = budget.ell();
  const double eta = 2.0 / (mu + ell);
  const double rho = rho_gd(budget);
  const Polynomial den({-rho, 1.0});
  TransferMatrix psi(2, 2);
  psi(0, 0) = TransferFunction(Polynomial({rho, 1.0}), den);
  psi(0, 1) = TransferFunction(Polynomial({0.0, 2.0 * rho}), den);
  psi(1, 0) = TransferFunction(Polynomial::constant(eta), den);
  psi(1, 1) = TransferFunction(Polynomial({0.0, eta}), den);
  const double w2 = ell == mu ? std::numeric_limits<double>::infinity()
                              : (ell + mu) / ((ell - mu) * (ell - mu));
  return {eta, eta, w2, psi};
}

bool splitting_eta2_admissible(double eta2, const RateBudget& budget) {
  require_finite(budget, "splitting_eta2_admissible");
  return eta2 >= 1.0 / budget.ell() && eta2 <= 1.0 / budget.mu();
}

AlgorithmSpec splitting_synthesis(const RateBudget& budget) {
  require_finite(budget, "splitting_synthesis");
  SplittingData data = splitting_data(budget);
  AlgorithmSpec spec;
  spec.name = "proximal_gradient";
  if (budget.mu() == budget.ell()) {
    data.eta2 = 1.0 / budget.ell();
    spec.flags.push_back("degenerate_budget");
  }
  const Polynomial acc({-1.0, 1.0});
  TransferMatrix G(2, 2);
  G(0, 0) = TransferFunction(Polynomial::constant(data.eta1), acc);
  G(0, 1) = TransferFunction(Polynomial({0.0, data.eta1}), acc);
  G(1, 0) = TransferFunction(Polynomial::constant(data.eta2), acc);
  G(1, 1) = TransferFunction(Polynomial({0.0, data.eta2}), acc);
  spec.feedthrough = feedthrough_matrix(G);
  spec.realization = realize(G);
  spec.G = std::move(G);
  spec.iteration = IterationForm{
      "proximal_gradient",
      "x+ = prox_{step g}(x - step grad h(x))",
      {{"step", data.eta1},
       {"eta1", data.eta1},
       {"eta2", data.eta2},
       {"w_squared", data.w_squared}}};
  spec.certified_rate = rho_gd(budget);
  spec.rate_class = "sector";
  return spec;
}

}  // namespace marginopt
