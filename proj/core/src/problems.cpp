#include "marginopt/problems.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "marginopt/error.hpp"

namespace marginopt {
namespace {

Eigen::MatrixXd gaussian_matrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  // Column-major fill keeps the draw order independent of Eigen internals.
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = normal(rng);
  }
  return m;
}

Eigen::VectorXd gaussian_vector(int n, std::mt19937_64& rng) {
  return gaussian_matrix(n, 1, rng).col(0);
}

Eigen::MatrixXd orthogonal_from(std::mt19937_64& rng, int d) {
  const Eigen::MatrixXd g = gaussian_matrix(d, d, rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  const Eigen::MatrixXd& R = qr.matrixQR();
  for (int i = 0; i < d; ++i) {
    if (R(i, i) < 0.0) Q.col(i) *= -1.0;
  }
  return Q;
}

void require_budget_dims(int d, const RateBudget& budget) {
  if (d < 1) throw Error(ErrorCode::kInvalidArgument, "dimension must be >= 1");
  if (!budget.has_ell()) {
    throw Error(ErrorCode::kInvalidArgument, "test problems need a finite ell");
  }
}

nlohmann::json seed_json(const std::optional<std::uint64_t>& seed) {
  return seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
}

Eigen::VectorXd prox_grad_steps(const PiecewiseQuadraticProblem& h,
                                double lambda, Eigen::VectorXd x, int steps) {
  const double eta = 2.0 / (h.mu() + h.ell());
  for (int t = 0; t < steps; ++t) {
    x = soft_threshold(x - eta * h.gradient(x), lambda * eta);
  }
  return x;
}

}  // namespace

QuadraticProblem::QuadraticProblem(Eigen::MatrixXd Q, Eigen::VectorXd q,
                                   double mu, double ell)
    : Q_(std::move(Q)), q_(std::move(q)), mu_(mu), ell_(ell) {
  const auto d = q_.size();
  if (d < 1 || Q_.rows() != d || Q_.cols() != d) {
    throw Error(ErrorCode::kInvalidArgument, "quadratic: shape mismatch");
  }
  if (!(mu > 0.0) || !(ell >= mu)) {
    throw Error(ErrorCode::kInvalidArgument, "quadratic: need 0 < mu <= ell");
  }
  if ((Q_ - Q_.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * std::max(1.0, Q_.cwiseAbs().maxCoeff())) {
    throw Error(ErrorCode::kInvalidArgument, "quadratic: Q is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Q_, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  if (ev.minCoeff() < mu - 1e-9 || ev.maxCoeff() > ell + 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                "quadratic: spectrum outside [mu, ell]");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(Q_);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kFactorizationFailure, "quadratic: Q not positive definite");
  }
  x_star_ = llt.solve(q_);
}

double QuadraticProblem::value(const Eigen::VectorXd& x) const {
  return 0.5 * x.dot(Q_ * x) - q_.dot(x);
}

Eigen::VectorXd QuadraticProblem::gradient(const Eigen::VectorXd& x) const {
  return Q_ * x - q_;
}

nlohmann::json QuadraticProblem::describe() const {
  return {{"type", "quadratic"}, {"d", dim()}, {"mu", mu_}, {"ell", ell_},
          {"seed", seed_json(seed)}};
}

Eigen::MatrixXd random_orthogonal(int d, std::uint64_t seed) {
  if (d < 1) throw Error(ErrorCode::kInvalidArgument, "dimension must be >= 1");
  std::mt19937_64 rng(seed);
  return orthogonal_from(rng, d);
}

QuadraticProblem random_quadratic(int d, const RateBudget& budget,
                                  std::uint64_t seed) {
  require_budget_dims(d, budget);
  if (d < 2) throw Error(ErrorCode::kInvalidArgument, "random_quadratic needs d >= 2");
  std::mt19937_64 rng(seed);
  const Eigen::MatrixXd V = orthogonal_from(rng, d);
  const double mu = budget.mu(), ell = budget.ell();
  Eigen::VectorXd lambda(d);
  lambda(0) = mu;
  lambda(1) = ell;
  std::uniform_real_distribution<double> uniform(std::log(mu), std::log(ell));
  for (int i = 2; i < d; ++i) lambda(i) = std::exp(uniform(rng));
  Eigen::MatrixXd Q = V * lambda.asDiagonal() * V.transpose();
  Q = 0.5 * (Q + Q.transpose()).eval();
  Eigen::VectorXd q = gaussian_vector(d, rng);
  QuadraticProblem p(std::move(Q), std::move(q), mu, ell);
  p.seed = seed;
  return p;
}

PiecewiseQuadraticProblem::PiecewiseQuadraticProblem(Eigen::MatrixXd A,
                                                     Eigen::VectorXd b,
                                                     double mu, double ell)
    : A_(std::move(A)), b_(std::move(b)), mu_(mu), ell_(ell) {
  const auto d = b_.size();
  if (d < 1 || A_.rows() != d || A_.cols() != d) {
    throw Error(ErrorCode::kInvalidArgument, "piecewise quadratic: shape mismatch");
  }
  if (!(mu > 0.0) || !(ell >= mu)) {
    throw Error(ErrorCode::kInvalidArgument, "piecewise quadratic: need 0 < mu <= ell");
  }
  const Eigen::MatrixXd gram = A_.transpose() * A_;
  if ((gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10) {
    throw Error(ErrorCode::kInvalidArgument, "piecewise quadratic: A is not orthogonal");
  }
  x_star_ = A_ * b_;
}

Eigen::VectorXd PiecewiseQuadraticProblem::curvature(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd r = A_.transpose() * x - b_;
  return r.unaryExpr([&](double v) { return v >= 0.0 ? ell_ : mu_; });
}

double PiecewiseQuadraticProblem::value(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd r = A_.transpose() * x - b_;
  double s = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    s += 0.5 * (r(i) >= 0.0 ? ell_ : mu_) * r(i) * r(i);
  }
  return s;
}

Eigen::VectorXd PiecewiseQuadraticProblem::gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd r = A_.transpose() * x - b_;
  for (Eigen::Index i = 0; i < r.size(); ++i) r(i) *= r(i) >= 0.0 ? ell_ : mu_;
  return A_ * r;
}

nlohmann::json PiecewiseQuadraticProblem::describe() const {
  return {{"type", "piecewise_quadratic"}, {"d", dim()}, {"mu", mu_},
          {"ell", ell_}, {"seed", seed_json(seed)}};
}

PiecewiseQuadraticProblem random_piecewise_quadratic(int d,
                                                     const RateBudget& budget,
                                                     std::uint64_t seed) {
  require_budget_dims(d, budget);
  std::mt19937_64 rng(seed);
  Eigen::MatrixXd A = orthogonal_from(rng, d);
  Eigen::VectorXd b = gaussian_vector(d, rng);
  PiecewiseQuadraticProblem p(std::move(A), std::move(b), budget.mu(),
                              budget.ell());
  p.seed = seed;
  return p;
}

Sector1DProblem::Sector1DProblem(double a, double b)
    : a_(a), b_(b), x_star_(Eigen::VectorXd::Zero(1)) {
  if (!(a > std::abs(b))) {
    throw Error(ErrorCode::kInvalidArgument, "sector example needs a > |b|");
  }
}

double Sector1DProblem::derivative(double x) const {
  return a_ * x + b_ * std::abs(x) * std::cos(x * std::abs(x));
}

double Sector1DProblem::delta(double e) const { return -derivative(-e); }

double Sector1DProblem::value(const Eigen::VectorXd& x) const {
  const double v = x(0);
  const double sign = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
  return 0.5 * a_ * v * v + 0.5 * b_ * sign * std::sin(v * v);
}

Eigen::VectorXd Sector1DProblem::gradient(const Eigen::VectorXd& x) const {
  return Eigen::VectorXd::Constant(1, derivative(x(0)));
}

nlohmann::json Sector1DProblem::describe() const {
  return {{"type", "sector_1d"}, {"a", a_}, {"b", b_}};
}

CompositeProblem::CompositeProblem(PiecewiseQuadraticProblem h, double lambda)
    : h_(std::move(h)), lambda_(lambda) {
  if (!(lambda > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "l1 weight must be positive");
  }
  x_star_ = solve_reference(h_, lambda_);
}

double CompositeProblem::value(const Eigen::VectorXd& x) const {
  return h_.value(x) + lambda_ * x.lpNorm<1>();
}

nlohmann::json CompositeProblem::describe() const {
  nlohmann::json j = h_.describe();
  j["type"] = "composite_l1";
  j["lambda"] = lambda_;
  return j;
}

CompositeProblem random_composite(int d, const RateBudget& budget,
                                  double lambda, std::uint64_t seed) {
  return CompositeProblem(random_piecewise_quadratic(d, budget, seed), lambda);
}

Eigen::VectorXd solve_reference(const PiecewiseQuadraticProblem& h,
                                double lambda) {
  const int d = h.dim();
  const Eigen::MatrixXd& A = h.A();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
  int budget = 500;
  for (int attempt = 0; attempt < 12; ++attempt) {
    x = prox_grad_steps(h, lambda, x, budget);
    budget *= 2;

    const Eigen::VectorXd D = h.curvature(x);
    std::vector<int> support;
    for (int i = 0; i < d; ++i) {
      if (x(i) != 0.0) support.push_back(i);
    }
    const auto s = static_cast<Eigen::Index>(support.size());
    Eigen::VectorXd candidate = Eigen::VectorXd::Zero(d);
    if (s > 0) {
      Eigen::MatrixXd AS(d, s);
      for (Eigen::Index k = 0; k < s; ++k) AS.col(k) = A.row(support[static_cast<size_t>(k)]).transpose();
      // Rows of A restricted to the support, weighted by the curvature.
      const Eigen::MatrixXd W = D.cwiseSqrt().asDiagonal() * AS;
      const Eigen::MatrixXd H = W.transpose() * W;
      const Eigen::VectorXd Db = D.cwiseProduct(h.b());
      Eigen::VectorXd rhs = AS.transpose() * Db;
      for (Eigen::Index k = 0; k < s; ++k) {
        rhs(k) -= lambda * (x(support[static_cast<size_t>(k)]) > 0.0 ? 1.0 : -1.0);
      }
      Eigen::LLT<Eigen::MatrixXd> llt(H);
      if (llt.info() != Eigen::Success) continue;
      const Eigen::VectorXd xs = llt.solve(rhs);
      for (Eigen::Index k = 0; k < s; ++k) candidate(support[static_cast<size_t>(k)]) = xs(k);
    }
    // Self-consistency: same curvature pattern, same signs, subgradient
    // condition off the support. Residuals sitting on the kink may take
    // either curvature since the gradient is continuous there.
    const Eigen::VectorXd resid = A.transpose() * candidate - h.b();
    const Eigen::VectorXd Dc = h.curvature(candidate);
    const double kink = 1e-12 * (1.0 + h.b().cwiseAbs().maxCoeff());
    bool consistent = true;
    for (int i = 0; i < d && consistent; ++i) {
      if (Dc(i) != D(i) && std::abs(resid(i)) > kink) consistent = false;
    }
    if (!consistent) continue;
    for (int i : support) {
      if (candidate(i) == 0.0 || (candidate(i) > 0.0) != (x(i) > 0.0)) {
        consistent = false;
        break;
      }
    }
    if (!consistent) continue;
    const Eigen::VectorXd g = h.gradient(candidate);
    const double gscale = 1e-10 * (1.0 + lambda + g.cwiseAbs().maxCoeff());
    for (int i = 0; i < d && consistent; ++i) {
      if (candidate(i) == 0.0) {
        if (std::abs(g(i)) > lambda * (1.0 + 1e-12)) consistent = false;
      } else if (std::abs(g(i) + lambda * (candidate(i) > 0.0 ? 1.0 : -1.0)) > gscale) {
        consistent = false;
      }
    }
    if (consistent) return candidate;
  }
  throw Error(ErrorCode::kFactorizationFailure,
              "reference solve did not settle on a consistent active set");
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& x, double threshold) {
  return x.unaryExpr([threshold](double v) {
    return std::max(v - threshold, 0.0) - std::max(-v - threshold, 0.0);
  });
}

QuadraticProx::QuadraticProx(const QuadraticProblem& f, double alpha)
    : alpha_q_(alpha * f.q()) {
  if (!(alpha > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "prox parameter must be positive");
  }
  const int d = f.dim();
  llt_.compute(Eigen::MatrixXd::Identity(d, d) + alpha * f.Q());
  if (llt_.info() != Eigen::Success) {
    throw Error(ErrorCode::kFactorizationFailure, "I + alpha Q is not positive definite");
  }
}

Eigen::VectorXd QuadraticProx::operator()(const Eigen::VectorXd& x) const {
  return llt_.solve(x + alpha_q_);
}

Eigen::VectorXd inner_prox(GradientCounter& grad, double alpha,
                           const Eigen::VectorXd& x, long long cap) {
  if (!(alpha >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "prox parameter must be >= 0");
  }
  const Objective& f = grad.objective();
  const double step = 2.0 / (2.0 + alpha * (f.mu() + f.ell()));
  const double threshold = 0.01 * x.norm();
  Eigen::VectorXd xi = x;
  if (x.norm() <= threshold) return xi;  // xi[-1] = 0
  for (long long k = 0; k < cap; ++k) {
    Eigen::VectorXd next = xi - step * (alpha * grad(xi) + xi - x);
    const double moved = (next - xi).norm();
    xi = std::move(next);
    if (moved <= threshold) return xi;
  }
  throw Error(ErrorCode::kInnerNotConverged, "inner prox solver hit its cap");
}

double residual_norm(const CompositeProblem& problem, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& grad_h) {
  const double lambda = problem.lambda();
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double r;
    if (x(i) != 0.0) {
      r = grad_h(i) + lambda * (x(i) > 0.0 ? 1.0 : -1.0);
    } else {
      r = std::max(std::abs(grad_h(i)) - lambda, 0.0);
    }
    s += r * r;
  }
  return std::sqrt(s);
}

double residual_norm(const CompositeProblem& problem, const Eigen::VectorXd& x) {
  return residual_norm(problem, x, problem.h().gradient(x));
}

}  // namespace marginopt
