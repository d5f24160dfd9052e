#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "marginopt/problems.hpp"
#include "marginopt/rates.hpp"
#include "marginopt/runtime.hpp"
#include "marginopt/synthesis.hpp"

using namespace marginopt;

TEST(Rates, EmpiricalGeometricSequence) {
  for (double r : {0.7, 0.95, 0.2}) {
    std::vector<double> e;
    for (int t = 0; t < 100 && std::pow(r, t) > 1e-11; ++t) e.push_back(3.0 * std::pow(r, t));
    if (e.size() < 20) continue;
    const RateEstimate est = empirical_rate(e);
    EXPECT_NEAR(est.rho_hat, r, 1e-6);
    EXPECT_NEAR(est.root_estimate, r, 1e-6);
    EXPECT_FALSE(est.flagged);
    EXPECT_EQ(est.method, "ratio");
    EXPECT_LT(est.window.first, est.window.second);
  }
}

TEST(Rates, EmpiricalFlagsTransient) {
  // slow start then fast tail: the root estimate lags the ratio estimate
  std::vector<double> e;
  double v = 1.0;
  for (int t = 0; t < 80; ++t) {
    e.push_back(v);
    v *= t < 40 ? 0.99 : 0.5;
  }
  const RateEstimate est = empirical_rate(e);
  EXPECT_NEAR(est.rho_hat, 0.5, 1e-9);
  EXPECT_TRUE(est.flagged);
}

TEST(Rates, EmpiricalTooShort) {
  EXPECT_MARGINOPT_ERROR(empirical_rate(std::vector<double>(10, 1.0)), kTooShort);
  std::vector<double> e{1.0};
  for (int t = 0; t < 30; ++t) e.push_back(1e-13);
  EXPECT_MARGINOPT_ERROR(empirical_rate(e), kTooShort);
}

TEST(Rates, EmpiricalHeavyBallRun) {
  const RateBudget b = RateBudget::finite(1.0, 9.0);
  const QuadraticProblem f = random_quadratic(20, b, 1);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  Eigen::VectorXd x0(20);
  for (int i = 0; i < 20; ++i) x0(i) = n(rng);
  const Trace tr = run_lti(heavy_ball(b), f, x0, StopCriteria{});
  const RateEstimate est = empirical_rate(tr);
  EXPECT_GE(est.rho_hat, 0.47);
  EXPECT_LE(est.rho_hat, 0.53);
}

TEST(Rates, SpectralExamples) {
  const RateBudget b = RateBudget::finite(1.0, 9.0);
  const TransferFunction hb = heavy_ball(b).scalar_G();
  EXPECT_NEAR(spectral_rate(hb, 1.0), 0.5, 1e-9);
  EXPECT_NEAR(spectral_rate(hb, 9.0), 0.5, 1e-9);
  EXPECT_NEAR(spectral_rate(hb, 4.0), 0.5, 1e-9);
  for (double alpha : {0.05, 0.2, 0.3}) {
    const TransferFunction gd = gradient_descent(b, alpha).scalar_G();
    for (double lambda : {1.0, 2.5, 9.0}) {
      EXPECT_NEAR(spectral_rate(gd, lambda), std::abs(1.0 - alpha * lambda), 1e-12);
    }
  }
  EXPECT_MARGINOPT_ERROR(spectral_rate(hb, 0.0), kInvalidArgument);
  EXPECT_MARGINOPT_ERROR(spectral_rate(hb, -1.0), kInvalidArgument);
}

TEST(Rates, SpectralImplicitGradient) {
  // closed loop pole of (alpha z + beta)/(z - 1) with gain lambda
  const RateBudget b = RateBudget::finite(1.0, 9.0);
  const AlgorithmSpec spec = implicit_gd(b, 0.5);
  const double a = spec.iteration->coefficient("alpha");
  const double be = spec.iteration->coefficient("beta");
  for (double lambda : {1.0, 3.0, 9.0}) {
    const double pole = (1.0 - be * lambda) / (1.0 + a * lambda);
    EXPECT_NEAR(spectral_rate(spec.scalar_G(), lambda), std::abs(pole), 1e-12);
  }
}

TEST(Rates, WorstCaseHeavyBallIsRhoMin) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 20; ++k) {
    const double mu = std::pow(10.0, u(rng));
    const double ell = mu * std::pow(10.0, 0.1 + std::abs(u(rng)) * 1.5);
    const RateBudget b = RateBudget::finite(mu, ell);
    EXPECT_NEAR(worst_case_rate(heavy_ball(b).scalar_G(), b), rho_min(b), 1e-6)
        << mu << " " << ell;
  }
}

TEST(Rates, WorstCaseOptimalGradientDescent) {
  for (auto [mu, ell] : {std::pair{1.0, 9.0}, std::pair{0.01, 100.0}, std::pair{2.0, 3.0}}) {
    const RateBudget b = RateBudget::finite(mu, ell);
    EXPECT_NEAR(worst_case_rate(optimal_gradient_descent(b).scalar_G(), b), rho_gd(b), 1e-9);
  }
}

TEST(Rates, WorstCaseImplicitHeavyBall) {
  const RateBudget b = RateBudget::finite(1.0, 100.0);
  for (double rho : {0.5, 0.2}) {
    EXPECT_LE(worst_case_rate(implicit_heavy_ball(b, rho).scalar_G(), b), rho + 1e-6);
  }
}

TEST(Rates, WorstCaseImplicitGradient) {
  const RateBudget b = RateBudget::finite(1.0, 9.0);
  for (double rho : {0.3, 0.5, 0.7}) {
    EXPECT_NEAR(worst_case_rate(implicit_gd(b, rho).scalar_G(), b), rho, 1e-6);
  }
}

TEST(Rates, SpectralContinuousOnGrid) {
  for (const RateBudget& b : {RateBudget::finite(0.01, 100.0), RateBudget::finite(1.0, 9.0)}) {
    const std::vector<TransferFunction> family = {
        heavy_ball(b).scalar_G(), optimal_gradient_descent(b).scalar_G(),
        implicit_heavy_ball(b, 0.3).scalar_G(), implicit_gd(b, 0.2).scalar_G(),
        implicit_gd(b, rho_gd(b)).scalar_G()};
    for (const TransferFunction& G : family) {
      const RateProfile p = rate_profile(G, b);
      ASSERT_GE(p.lambda.size(), static_cast<size_t>(kDefaultRateGrid));
      EXPECT_EQ(p.lambda.front(), b.mu());
      EXPECT_EQ(p.lambda.back(), b.ell());
      for (size_t i = 1; i < p.lambda.size(); ++i) {
        EXPECT_GT(p.lambda[i], p.lambda[i - 1]);
        EXPECT_LT(std::abs(p.rate[i] - p.rate[i - 1]), kRateJump) << p.lambda[i];
        EXPECT_EQ(p.rate[i], spectral_rate(G, p.lambda[i]));
      }
    }
  }
}

TEST(Rates, ProfileContainsLogGrid) {
  const RateBudget b = RateBudget::finite(0.01, 100.0);
  const RateProfile p = rate_profile(optimal_gradient_descent(b).scalar_G(), b, 9);
  for (int i = 0; i < 9; ++i) {
    const double l = 0.01 * std::pow(1e4, i / 8.0);
    bool found = false;
    for (double x : p.lambda) found = found || std::abs(x - l) <= 1e-12 * l;
    EXPECT_TRUE(found) << l;
  }
  EXPECT_MARGINOPT_ERROR(rate_profile(heavy_ball(b).scalar_G(), b, 2), kInvalidArgument);
}

TEST(Rates, WorstCaseDominatesSpectral) {
  const RateBudget b = RateBudget::finite(0.5, 20.0);
  const TransferFunction G = gradient_descent(b, 0.07).scalar_G();
  const double worst = worst_case_rate(G, b);
  for (double lambda = 0.5; lambda <= 20.0; lambda += 0.37) {
    EXPECT_LE(spectral_rate(G, lambda), worst + 1e-12);
  }
  EXPECT_NEAR(worst, std::max(std::abs(1.0 - 0.07 * 0.5), std::abs(1.0 - 0.07 * 20.0)), 1e-9);
}
