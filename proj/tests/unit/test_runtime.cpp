#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "marginopt/problems.hpp"
#include "marginopt/rates.hpp"
#include "marginopt/runtime.hpp"
#include "marginopt/synthesis.hpp"

using namespace marginopt;

namespace {

Eigen::VectorXd gaussian(int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v(i) = n(rng);
  return v;
}

StopCriteria fixed_steps(long long n) {
  StopCriteria s;
  s.tol = 0.0;
  s.max_iter = n;
  s.keep_iterates = true;
  return s;
}

double max_dev(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b) {
  EXPECT_EQ(a.size(), b.size());
  double worst = 0.0;
  for (size_t t = 0; t < std::min(a.size(), b.size()); ++t) {
    worst = std::max(worst, (a[t] - b[t]).cwiseAbs().maxCoeff());
  }
  return worst;
}

// x+ = x + m (x - x-) - step * grad, x[-1] = x0
std::vector<Eigen::VectorXd> two_term(const Objective& f, const Eigen::VectorXd& x0,
                                      double m, double step, int steps) {
  std::vector<Eigen::VectorXd> out;
  Eigen::VectorXd prev = x0, x = x0;
  for (int t = 0; t <= steps; ++t) {
    out.push_back(x);
    Eigen::VectorXd next = x + m * (x - prev) - step * f.gradient(x);
    prev = x;
    x = next;
  }
  return out;
}

}  // namespace

TEST(Runtime, HeavyBallMatchesTwoTermRecursion) {
  const RateBudget b = RateBudget::finite(1.0, 9.0);
  const QuadraticProblem f = random_quadratic(20, b, 3);
  const Eigen::VectorXd x0 = gaussian(20, 4);
  const Trace tr = run_lti(heavy_ball(b), f, x0, fixed_steps(200));
  const auto want = two_term(f, x0, 0.25, 0.25, 200);
  const double scale = std::max(1.0, f.x_star().cwiseAbs().maxCoeff());
  EXPECT_LE(max_dev(tr.iterates, want), 1e-12 * scale);
  EXPECT_EQ(tr.stop_reason, StopReason::kMaxIter);
  EXPECT_EQ(tr.terminated_at, 200);
}

TEST(Runtime, GradientDescentSpec) {
  const RateBudget b = RateBudget::finite(1.0, 9.0);
  const QuadraticProblem f = random_quadratic(10, b, 1);
  const Eigen::VectorXd x0 = gaussian(10, 2);
  for (double alpha : {0.05, 0.2}) {
    const Trace tr = run_lti(gradient_descent(b, alpha), f, x0, fixed_steps(60));
    EXPECT_LE(max_dev(tr.iterates, two_term(f, x0, 0.0, alpha, 60)), 1e-12);
    for (size_t t = 0; t < tr.size(); ++t) EXPECT_EQ(tr.grad_evals[t], static_cast<long long>(t));
  }
}

TEST(Runtime, StartAtMinimizerStopsImmediately) {
  const RateBudget b = RateBudget::finite(1.0, 9.0);
  const QuadraticProblem f = random_quadratic(5, b, 1);
  const Trace tr = run_lti(heavy_ball(b), f, f.x_star(), StopCriteria{});
  ASSERT_EQ(tr.size(), 1u);
  EXPECT_EQ(tr.err_norm[0], 0.0);
  EXPECT_EQ(tr.grad_evals[0], 0);
  EXPECT_EQ(tr.stop_reason, StopReason::kTolerance);
  EXPECT_EQ(tr.terminated_at, 0);
}

TEST(Runtime, RunLtiRejectsBiproper) {
  const RateBudget b = RateBudget::finite(1.0, 9.0);
  const QuadraticProblem f = random_quadratic(5, b, 1);
  EXPECT_MARGINOPT_ERROR(run_lti(implicit_gd(b, 0.5), f, gaussian(5, 1), StopCriteria{}),
                         kNotStrictlyCausal);
  EXPECT_MARGINOPT_ERROR(run_lti(heavy_ball(b), f, gaussian(4, 1), StopCriteria{}),
                         kInvalidArgument);
}

TEST(Runtime, Divergence) {
  const RateBudget b = RateBudget::finite(1.0, 9.0);
  const QuadraticProblem f = random_quadratic(5, b, 1);
  EXPECT_MARGINOPT_ERROR(run_lti(gradient_descent(b, 1.0), f, gaussian(5, 1), StopCriteria{}),
                         kDivergence);
}

TEST(Runtime, TraceInvariants) {
  const RateBudget b = RateBudget::finite(0.1, 10.0);
  const auto f = random_piecewise_quadratic(30, b, 8);
  const Trace tr = run_implicit_prox(b, 0.7, f, Eigen::VectorXd::Zero(30), StopCriteria{});
  ASSERT_GT(tr.size(), 2u);
  for (size_t t = 0; t < tr.size(); ++t) {
    EXPECT_GE(tr.err_norm[t], 0.0);
    if (t > 0) EXPECT_GE(tr.grad_evals[t], tr.grad_evals[t - 1]);
  }
  EXPECT_EQ(tr.stop_reason, StopReason::kTolerance);
  EXPECT_LE(tr.err_norm.back(), 1e-10);
}

TEST(Runtime, ImplicitHeavyBallAtRhoMinIsHeavyBall) {
  const RateBudget b = RateBudget::finite(1.0, 9.0);
  const QuadraticProblem f = random_quadratic(20, b, 3);
  const Eigen::VectorXd x0 = gaussian(20, 4);
  const Trace hb = run_lti(heavy_ball(b), f, x0, fixed_steps(100));
  const Trace ihb = run_implicit_hb(b, rho_min(b), f, x0, fixed_steps(100));
  EXPECT_LE(max_dev(hb.iterates, ihb.iterates), 1e-12);
}

TEST(Runtime, ImplicitHeavyBallMatchesEliminatedForm) {
  const RateBudget b = RateBudget::finite(1.0, 100.0);
  const QuadraticProblem f = random_quadratic(12, b, 5);
  const Eigen::VectorXd x0 = gaussian(12, 6);
  for (double rho : {0.3, 0.6}) {
    const AlgorithmSpec spec = implicit_heavy_ball(b, rho);
    const double delta = delta_for_rate(rho, b).value;
    const double m = spec.iteration->coefficient("momentum");
    const double gain = spec.iteration->coefficient("gain");
    EXPECT_NEAR(m, rho * rho, 1e-15);
    EXPECT_NEAR(spec.iteration->coefficient("regularizer"), delta, 1e-15);
    const Eigen::LLT<Eigen::MatrixXd> llt(Eigen::MatrixXd::Identity(12, 12) + delta * f.Q());
    std::vector<Eigen::VectorXd> want;
    Eigen::VectorXd prev = x0, x = x0;
    for (int t = 0; t <= 50; ++t) {
      want.push_back(x);
      Eigen::VectorXd next = x + m * (x - prev) - gain * llt.solve(f.Q() * x - f.q());
      prev = x;
      x = next;
    }
    const Trace tr = run_implicit_hb(b, rho, f, x0, fixed_steps(50));
    EXPECT_LE(max_dev(tr.iterates, want), 1e-10 * std::max(1.0, x0.norm()));
  }
}

TEST(Runtime, ImplicitHeavyBallNearNewton) {
  const RateBudget b = RateBudget::finite(1.0, 4.0);
  const QuadraticProblem f = random_quadratic(10, b, 2);
  const Trace tr = run_implicit_hb(b, 1e-3, f, gaussian(10, 3), fixed_steps(3));
  EXPECT_LT(tr.err_norm[1] / tr.err_norm[0], 0.05);
}

TEST(Runtime, ImplicitHeavyBallTailRate) {
  const RateBudget b = RateBudget::finite(1.0, 100.0);
  const QuadraticProblem f = random_quadratic(30, b, 4);
  StopCriteria stop;
  stop.tol = 1e-10;
  const Trace tr = run_implicit_hb(b, 0.5, f, gaussian(30, 5), stop);
  const RateEstimate r = empirical_rate(tr);
  EXPECT_GE(r.rho_hat, 0.47);
  EXPECT_LE(r.rho_hat, 0.53);
}

TEST(Runtime, ImplicitProxAtGradientRateIsOptimalGradientDescent) {
  const RateBudget b = RateBudget::finite(0.5, 8.0);
  const QuadraticProblem f = random_quadratic(15, b, 6);
  const Eigen::VectorXd x0 = gaussian(15, 7);
  const Trace gd = run_lti(optimal_gradient_descent(b), f, x0, fixed_steps(80));
  const Trace ip = run_implicit_prox(b, rho_gd(b), f, x0, fixed_steps(80));
  const Trace ipc =
      run_implicit_prox(b, rho_gd(b), f, x0, fixed_steps(80), ProxMode::kClosedForm);
  EXPECT_LE(max_dev(gd.iterates, ip.iterates), 1e-12);
  EXPECT_LE(max_dev(gd.iterates, ipc.iterates), 1e-12);
  // the inner solver still spends one gradient at alpha = 0
  for (size_t t = 0; t < ip.size(); ++t) {
    EXPECT_EQ(ip.grad_evals[t], 2 * static_cast<long long>(t));
    EXPECT_EQ(ipc.grad_evals[t], static_cast<long long>(t));
  }
}

TEST(Runtime, ImplicitProxClosedFormRate) {
  const RateBudget b = RateBudget::finite(0.1, 10.0);
  const QuadraticProblem f = random_quadratic(20, b, 2);
  for (double rho : {0.3, 0.6, 0.9}) {
    const Trace tr = run_implicit_prox(b, rho, f, gaussian(20, 1), StopCriteria{},
                                       ProxMode::kClosedForm);
    EXPECT_NEAR(empirical_rate(tr).rho_hat, rho, 0.03) << "rho=" << rho;
  }
  const auto pw = random_piecewise_quadratic(4, b, 1);
  EXPECT_MARGINOPT_ERROR(
      run_implicit_prox(b, 0.5, pw, gaussian(4, 1), StopCriteria{}, ProxMode::kClosedForm),
      kInvalidArgument);
}

TEST(Runtime, ImplicitProxCountsInnerGradients) {
  const RateBudget b = RateBudget::finite(0.01, 100.0);
  const auto f = random_piecewise_quadratic(30, b, 0);
  StopCriteria stop;
  stop.tol = 1e-8;
  stop.max_iter = 1000000;
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(30);
  const Trace slow = run_implicit_prox_coefficients(0.0, 2.0 / 100.01, f, x0, stop);
  const Trace fast = run_implicit_prox(b, rho_circle(1.0, b), f, x0, stop);
  EXPECT_EQ(slow.stop_reason, StopReason::kTolerance);
  EXPECT_EQ(fast.stop_reason, StopReason::kTolerance);
  EXPECT_GT(fast.grad_evals.back(), static_cast<long long>(fast.size()));
  EXPECT_LT(fast.grad_evals.back(), slow.grad_evals.back());
}

TEST(Runtime, ImplicitProxRejectsSlowRate) {
  const RateBudget b = RateBudget::finite(1.0, 9.0);
  const QuadraticProblem f = random_quadratic(3, b, 0);
  EXPECT_MARGINOPT_ERROR(run_implicit_prox(b, 0.95, f, gaussian(3, 0), StopCriteria{}),
                         kRateTooSlow);
}

TEST(Runtime, ProxGradWithVanishingWeightIsGradientDescent) {
  const RateBudget b = RateBudget::finite(0.5, 10.0);
  const auto h = random_piecewise_quadratic(12, b, 3);
  const CompositeProblem c(h, 1e-300);
  const Eigen::VectorXd x0 = gaussian(12, 4);
  const Trace pg = run_prox_grad(b, c, x0, fixed_steps(60));
  const Trace gd = run_lti(optimal_gradient_descent(b), h, x0, fixed_steps(60));
  EXPECT_LE(max_dev(pg.iterates, gd.iterates), 1e-12);
}

TEST(Runtime, ProxGradEnvelopeAndResidual) {
  const RateBudget b = RateBudget::finite(1.0, 20.0);
  const CompositeProblem c = random_composite(60, b, 1.0, 2);
  const Trace tr = run_prox_grad(b, c, Eigen::VectorXd::Zero(60), StopCriteria{});
  ASSERT_EQ(tr.residual_norm.size(), tr.size());
  EXPECT_EQ(tr.stop_reason, StopReason::kTolerance);
  const double rho = rho_gd(b);
  for (size_t t = 0; t < tr.size(); ++t) {
    EXPECT_LE(tr.err_norm[t], 1.05 * tr.err_norm[0] * std::pow(rho, t)) << t;
  }
  EXPECT_LT(tr.residual_norm.back(), 1e-9);
}

TEST(Runtime, CertifiedEnvelope) {
  // |e[t]| <= 1.1 C rho^t, C fitted on the first 10 steps
  const RateBudget b = RateBudget::finite(0.2, 10.0);
  const QuadraticProblem f = random_quadratic(25, b, 9);
  const auto check = [](const Trace& tr, double rho) {
    double C = 0.0;
    for (size_t t = 0; t < 10 && t < tr.size(); ++t) {
      C = std::max(C, tr.err_norm[t] / std::pow(rho, t));
    }
    for (size_t t = 0; t < tr.size(); ++t) {
      if (tr.err_norm[t] < 1e-9) break;
      EXPECT_LE(tr.err_norm[t], 1.1 * C * std::pow(rho, t)) << t;
    }
  };
  check(run_lti(optimal_gradient_descent(b), f, gaussian(25, 1), StopCriteria{}), rho_gd(b));
  for (double rho : {0.4, 0.8}) {
    check(run_implicit_prox(b, rho, f, gaussian(25, 1), StopCriteria{}, ProxMode::kClosedForm),
          rho);
  }
}

TEST(Runtime, Deterministic) {
  const RateBudget b = RateBudget::finite(0.01, 100.0);
  const auto run = [&] {
    const auto f = random_piecewise_quadratic(20, b, 11);
    StopCriteria stop;
    stop.tol = 1e-8;
    return run_implicit_prox(b, rho_circle(0.5, b), f, Eigen::VectorXd::Zero(20), stop);
  };
  const Trace a = run(), c = run();
  EXPECT_TRUE(a.err_norm == c.err_norm);
  EXPECT_TRUE(a.grad_evals == c.grad_evals);
}

TEST(Runtime, TraceCsvFormat) {
  Trace tr;
  tr.err_norm = {1.0, 0.5, 0.1 + 0.2, 1e-300, 0.0};
  tr.grad_evals = {0, 1, 3, 6, 10};
  std::ostringstream out;
  write_trace_csv(out, tr, {"00ff00ff00ff00ff", 7, 2});
  const std::string want =
      "# config_hash=00ff00ff00ff00ff seed=7 subsample=2\n"
      "t,err_norm,residual_norm,grad_evals\n"
      "0,1,,0\n"
      "2,0.30000000000000004,,3\n"
      "4,0,,10\n";
  EXPECT_EQ(out.str(), want);

  tr.residual_norm = {2.0, 1.0, 0.5, 0.25, 0.125};
  std::ostringstream all;
  write_trace_csv(all, tr, {"h", 0, 3});
  std::istringstream in(all.str());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 5u);
  EXPECT_EQ(lines[2], "0,1,2,0");
  EXPECT_EQ(lines[3], "3,1e-300,0.25,6");
  EXPECT_EQ(lines[4], "4,0,0.125,10");
  EXPECT_EQ(std::strtod("0.30000000000000004", nullptr), 0.1 + 0.2);
}

TEST(Runtime, StopReasonNames) {
  EXPECT_EQ(to_string(StopReason::kTolerance), "tolerance");
  EXPECT_EQ(to_string(StopReason::kMaxIter), "max_iter");
  EXPECT_EQ(to_string(StopReason::kDivergence), "divergence");
}
