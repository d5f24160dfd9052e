#pragma once

#include <cstdint>
#include <memory>
#include <optional>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "marginopt/synthesis.hpp"

namespace marginopt {

// Smooth objective with gradient slope-restricted in [mu, ell].
class Objective {
 public:
  virtual ~Objective() = default;
  virtual int dim() const = 0;
  virtual double mu() const = 0;
  virtual double ell() const = 0;
  virtual double value(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& x) const = 0;
  virtual const Eigen::VectorXd& x_star() const = 0;
  virtual nlohmann::json describe() const = 0;
};

// Per-run tally of gradient calls; one increment per call.
class GradientCounter {
 public:
  explicit GradientCounter(const Objective& f) : f_(f) {}
  Eigen::VectorXd operator()(const Eigen::VectorXd& x) {
    ++count_;
    return f_.gradient(x);
  }
  long long count() const { return count_; }
  const Objective& objective() const { return f_; }

 private:
  const Objective& f_;
  long long count_ = 0;
};

// f(x) = 1/2 x'Qx - q'x.
class QuadraticProblem : public Objective {
 public:
  // Throws InvalidArgument if Q is not symmetric or its spectrum leaves
  // [mu - 1e-9, ell + 1e-9].
  QuadraticProblem(Eigen::MatrixXd Q, Eigen::VectorXd q, double mu, double ell);

  int dim() const override { return static_cast<int>(q_.size()); }
  double mu() const override { return mu_; }
  double ell() const override { return ell_; }
  double value(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override;
  const Eigen::VectorXd& x_star() const override { return x_star_; }
  nlohmann::json describe() const override;

  const Eigen::MatrixXd& Q() const { return Q_; }
  const Eigen::VectorXd& q() const { return q_; }
  std::optional<std::uint64_t> seed;

 private:
  Eigen::MatrixXd Q_;
  Eigen::VectorXd q_;
  double mu_;
  double ell_;
  Eigen::VectorXd x_star_;
};

// Eigenvalues mu, ell and d-2 log-uniform draws; Haar-like basis; Gaussian q.
QuadraticProblem random_quadratic(int d, const RateBudget& budget,
                                  std::uint64_t seed);

// Orthogonal factor of the QR of a seeded Gaussian matrix, R diagonal made
// positive.
Eigen::MatrixXd random_orthogonal(int d, std::uint64_t seed);

// h(x) = sum_i phi(a_i'x - b_i), phi(v) = ell v^2/2 for v >= 0 and mu v^2/2
// otherwise; a_i the columns of the orthogonal A.
class PiecewiseQuadraticProblem : public Objective {
 public:
  PiecewiseQuadraticProblem(Eigen::MatrixXd A, Eigen::VectorXd b, double mu,
                            double ell);

  int dim() const override { return static_cast<int>(b_.size()); }
  double mu() const override { return mu_; }
  double ell() const override { return ell_; }
  double value(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override;
  const Eigen::VectorXd& x_star() const override { return x_star_; }
  nlohmann::json describe() const override;

  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::VectorXd& b() const { return b_; }
  // phi'' pattern at x: ell where a_i'x - b_i >= 0, mu elsewhere.
  Eigen::VectorXd curvature(const Eigen::VectorXd& x) const;
  std::optional<std::uint64_t> seed;

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  double mu_;
  double ell_;
  Eigen::VectorXd x_star_;
};

PiecewiseQuadraticProblem random_piecewise_quadratic(int d,
                                                     const RateBudget& budget,
                                                     std::uint64_t seed);

// f'(x) = a x + b |x| cos(x |x|), minimizer 0.
class Sector1DProblem : public Objective {
 public:
  Sector1DProblem(double a, double b);

  int dim() const override { return 1; }
  double mu() const override { return a_ - std::abs(b_); }
  double ell() const override { return a_ + std::abs(b_); }
  double value(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override;
  const Eigen::VectorXd& x_star() const override { return x_star_; }
  nlohmann::json describe() const override;

  double derivative(double x) const;
  // Delta_f(e) = -f'(x* - e).
  double delta(double e) const;

 private:
  double a_;
  double b_;
  Eigen::VectorXd x_star_;
};

// h + lambda |x|_1 with h piecewise quadratic.
class CompositeProblem {
 public:
  // Computes the reference minimizer (see solve_reference).
  CompositeProblem(PiecewiseQuadraticProblem h, double lambda);

  const PiecewiseQuadraticProblem& h() const { return h_; }
  double lambda() const { return lambda_; }
  int dim() const { return h_.dim(); }
  const Eigen::VectorXd& x_star() const { return x_star_; }
  double value(const Eigen::VectorXd& x) const;
  nlohmann::json describe() const;

 private:
  PiecewiseQuadraticProblem h_;
  double lambda_;
  Eigen::VectorXd x_star_;
};

CompositeProblem random_composite(int d, const RateBudget& budget,
                                  double lambda, std::uint64_t seed);

// Proximal gradient to a coarse tolerance, then exact solves of the optimality
// system on the detected support and curvature pattern until the pattern is
// self-consistent. Throws FactorizationFailure if that never happens.
Eigen::VectorXd solve_reference(const PiecewiseQuadraticProblem& h,
                                double lambda);

// Component-wise max(x - t, 0) - max(-x - t, 0).
Eigen::VectorXd soft_threshold(const Eigen::VectorXd& x, double threshold);

// (I + alpha Q)^-1 (x + alpha q), factorized once.
class QuadraticProx {
 public:
  QuadraticProx(const QuadraticProblem& f, double alpha);
  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;

 private:
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_q_;
};

inline constexpr long long kInnerIterationCap = 1000000;

// Gradient descent on alpha f(xi) + |xi - x|^2/2 from xi = x with step
// 2/(mu_sub + ell_sub), mu_sub = 1 + alpha mu, ell_sub = 1 + alpha ell,
// stopping once |xi[k] - xi[k-1]| <= 0.01 |x| (xi[-1] = 0). Every inner step
// is a counted gradient call. Throws InnerNotConverged at the cap.
Eigen::VectorXd inner_prox(GradientCounter& grad, double alpha,
                           const Eigen::VectorXd& x,
                           long long cap = kInnerIterationCap);

// min over the l1 subdifferential of |grad h(x) + xi|.
double residual_norm(const CompositeProblem& problem, const Eigen::VectorXd& x);
double residual_norm(const CompositeProblem& problem, const Eigen::VectorXd& x,
                     const Eigen::VectorXd& grad_h);

}  // namespace marginopt
