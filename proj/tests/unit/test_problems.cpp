#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "helpers.hpp"
#include "marginopt/certificates.hpp"
#include "marginopt/problems.hpp"
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

// central differences of the objective value
Eigen::VectorXd numeric_gradient(const Objective& f, const Eigen::VectorXd& x) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x(i)));
    Eigen::VectorXd a = x, b = x;
    a(i) += h;
    b(i) -= h;
    g(i) = (f.value(a) - f.value(b)) / (2.0 * h);
  }
  return g;
}

}  // namespace

TEST(Problems, RandomQuadraticTwoDimensional) {
  const QuadraticProblem f = random_quadratic(2, RateBudget::finite(1.0, 9.0), 3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f.Q());
  EXPECT_NEAR(es.eigenvalues()(0), 1.0, 1e-12);
  EXPECT_NEAR(es.eigenvalues()(1), 9.0, 1e-12);
}

TEST(Problems, RandomQuadraticSpectrum) {
  for (std::uint64_t seed : {0u, 1u, 2u, 3u}) {
    const QuadraticProblem f = random_quadratic(40, RateBudget::finite(0.01, 100.0), seed);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(f.Q());
    EXPECT_GE(es.eigenvalues().minCoeff(), 0.01 - 1e-9);
    EXPECT_LE(es.eigenvalues().maxCoeff(), 100.0 + 1e-9);
    EXPECT_NEAR(es.eigenvalues().minCoeff(), 0.01, 1e-9);
    EXPECT_NEAR(es.eigenvalues().maxCoeff(), 100.0, 1e-9);
    EXPECT_LT((f.Q() - f.Q().transpose()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT(f.gradient(f.x_star()).norm(), 1e-8);
  }
}

TEST(Problems, GeneratorsAreDeterministic) {
  const RateBudget b = RateBudget::finite(0.1, 10.0);
  const QuadraticProblem q1 = random_quadratic(12, b, 42), q2 = random_quadratic(12, b, 42);
  EXPECT_TRUE(q1.Q() == q2.Q());
  EXPECT_TRUE(q1.q() == q2.q());
  EXPECT_FALSE(random_quadratic(12, b, 43).Q() == q1.Q());
  const auto p1 = random_piecewise_quadratic(12, b, 5), p2 = random_piecewise_quadratic(12, b, 5);
  EXPECT_TRUE(p1.A() == p2.A());
  EXPECT_TRUE(p1.b() == p2.b());
  const auto c1 = random_composite(12, b, 0.5, 9), c2 = random_composite(12, b, 0.5, 9);
  EXPECT_TRUE(c1.x_star() == c2.x_star());
  EXPECT_EQ(q1.describe()["seed"], 42);
  EXPECT_EQ(c1.describe()["type"], "composite_l1");
}

TEST(Problems, RandomQuadraticRejectsSmallDimension) {
  EXPECT_MARGINOPT_ERROR(random_quadratic(1, RateBudget::finite(1.0, 2.0), 0),
                         kInvalidArgument);
}

TEST(Problems, RandomOrthogonal) {
  const Eigen::MatrixXd A = random_orthogonal(30, 8);
  EXPECT_LT((A.transpose() * A - Eigen::MatrixXd::Identity(30, 30)).cwiseAbs().maxCoeff(),
            1e-12);
}

TEST(Problems, QuadraticGradient) {
  const QuadraticProblem f = random_quadratic(6, RateBudget::finite(1.0, 5.0), 1);
  const Eigen::VectorXd x = gaussian(6, 2);
  EXPECT_LT((f.gradient(x) - (f.Q() * x - f.q())).norm(), 1e-14);
  EXPECT_LT((numeric_gradient(f, x) - f.gradient(x)).norm(), 1e-6);
}

TEST(Problems, PiecewiseGradientVanishesAtAb) {
  const auto h = random_piecewise_quadratic(25, RateBudget::finite(0.1, 100.0), 4);
  EXPECT_LT((h.x_star() - h.A() * h.b()).norm(), 1e-15);
  EXPECT_LT(h.gradient(h.A() * h.b()).norm(), 1e-12);
  const Eigen::VectorXd x = gaussian(25, 6);
  EXPECT_LT((numeric_gradient(h, x) - h.gradient(x)).norm(), 1e-4);
}

TEST(Problems, PiecewiseSlopeRestricted) {
  const RateBudget b = RateBudget::finite(0.1, 100.0);
  const auto h = random_piecewise_quadratic(10, b, 7);
  for (int k = 0; k < 200; ++k) {
    const Eigen::VectorXd x = gaussian(10, 100 + k), y = gaussian(10, 1000 + k);
    const Eigen::VectorXd dg = h.gradient(x) - h.gradient(y);
    const Eigen::VectorXd dx = x - y;
    const double s = dg.dot(dx) / dx.squaredNorm();
    EXPECT_GE(s, 0.1 - 1e-12);
    EXPECT_LE(dg.norm(), 100.0 * dx.norm() * (1.0 + 1e-12));
  }
}

TEST(Problems, PiecewiseRejectsNonOrthogonal) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(3, 3);
  A(0, 1) = 0.1;
  EXPECT_MARGINOPT_ERROR(PiecewiseQuadraticProblem(A, Eigen::VectorXd::Ones(3), 1.0, 2.0),
                         kInvalidArgument);
}

TEST(Problems, SectorExampleGradient) {
  const Sector1DProblem f(4.0, 3.0);
  EXPECT_EQ(f.mu(), 1.0);
  EXPECT_EQ(f.ell(), 7.0);
  for (double e = -3.0; e <= 3.0; e += 0.173) {
    const double want = 4.0 * e - 3.0 * std::abs(e) * std::cos(e * std::abs(e));
    EXPECT_NEAR(f.delta(e), want, 1e-13);
    EXPECT_NEAR(f.delta(e), -f.derivative(-e), 0.0);
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, e);
    EXPECT_NEAR(numeric_gradient(f, x)(0), f.gradient(x)(0), 1e-6);
  }
  EXPECT_EQ(f.gradient(f.x_star())(0), 0.0);
  EXPECT_MARGINOPT_ERROR(Sector1DProblem(3.0, 3.0), kInvalidArgument);
}

TEST(Problems, SectorExampleBoundIsTight) {
  for (auto [a, b] : {std::pair{4.0, 3.0}, std::pair{2.0, -1.5}, std::pair{5.0, 1.0}}) {
    const Sector1DProblem f(a, b);
    const auto delta = [&](double e) { return f.delta(e); };
    const double lo = a - std::abs(b), hi = a + std::abs(b);
    EXPECT_TRUE(verify_sector_grid(delta, {lo, hi}, 100000, 3.0));
    EXPECT_FALSE(verify_sector_grid(delta, {lo + 0.05, hi}, 100000, 3.0));
    EXPECT_FALSE(verify_sector_grid(delta, {lo, hi - 0.05}, 100000, 3.0));
  }
}

TEST(Problems, SoftThresholdExamples) {
  Eigen::VectorXd x(3);
  x << 2.0, -0.5, -3.0;
  const Eigen::VectorXd y = soft_threshold(x, 1.0);
  EXPECT_EQ(y(0), 1.0);
  EXPECT_EQ(y(1), 0.0);
  EXPECT_EQ(y(2), -2.0);
  EXPECT_TRUE(soft_threshold(x, 0.0) == x);
}

TEST(Problems, QuadraticProxStationarity) {
  const QuadraticProblem f = random_quadratic(15, RateBudget::finite(0.1, 50.0), 2);
  for (double alpha : {0.01, 1.0, 30.0}) {
    const QuadraticProx prox(f, alpha);
    for (int k = 0; k < 5; ++k) {
      const Eigen::VectorXd x = 10.0 * gaussian(15, 20 + k);
      const Eigen::VectorXd p = prox(x);
      EXPECT_LT((alpha * f.gradient(p) + p - x).norm(), 1e-8 * std::max(1.0, x.norm()));
    }
  }
}

TEST(Problems, InnerProxMatchesClosedForm) {
  // three significant digits against the closed form
  const QuadraticProblem f = random_quadratic(10, RateBudget::finite(1.0, 4.0), 5);
  for (double alpha : {0.02, 0.1, 0.3}) {
    const QuadraticProx closed(f, alpha);
    for (int k = 0; k < 5; ++k) {
      const Eigen::VectorXd x = f.x_star() + gaussian(10, 50 + k);
      GradientCounter grad(f);
      const Eigen::VectorXd inner = inner_prox(grad, alpha, x);
      const Eigen::VectorXd want = closed(x);
      EXPECT_LT((inner - want).norm(), 5e-4 * want.norm()) << "alpha=" << alpha;
      EXPECT_GT(grad.count(), 0);
    }
  }
}

TEST(Problems, InnerProxErrorWithinStoppingBound) {
  // stopping on a move below 0.01 |x| leaves at most 0.01 |x| r/(1-r), r the
  // inner contraction factor
  for (auto [mu, ell] : {std::pair{1.0, 4.0}, std::pair{0.01, 100.0}}) {
    const RateBudget b = RateBudget::finite(mu, ell);
    const QuadraticProblem f = random_quadratic(10, b, 5);
    for (double alpha : {0.001, 0.02, 0.3, 1.0, 10.0}) {
      const double ks = sub_condition(alpha, b);
      const double r = (ks - 1.0) / (ks + 1.0);
      const QuadraticProx closed(f, alpha);
      for (int k = 0; k < 5; ++k) {
        const Eigen::VectorXd x = f.x_star() + gaussian(10, 80 + k);
        GradientCounter grad(f);
        const Eigen::VectorXd inner = inner_prox(grad, alpha, x);
        EXPECT_LE((inner - closed(x)).norm(), 0.01 * x.norm() * r / (1.0 - r) + 1e-12)
            << "alpha=" << alpha;
      }
    }
  }
}

TEST(Problems, InnerProxZeroAlphaIsIdentity) {
  const QuadraticProblem f = random_quadratic(4, RateBudget::finite(1.0, 4.0), 5);
  GradientCounter grad(f);
  const Eigen::VectorXd x = gaussian(4, 1);
  EXPECT_LT((inner_prox(grad, 0.0, x) - x).norm(), 1e-15);
}

TEST(Problems, InnerProxCap) {
  const QuadraticProblem f = random_quadratic(8, RateBudget::finite(0.01, 100.0), 5);
  GradientCounter grad(f);
  EXPECT_MARGINOPT_ERROR(inner_prox(grad, 100.0, gaussian(8, 3), 3), kInnerNotConverged);
  EXPECT_EQ(grad.count(), 3);
  EXPECT_MARGINOPT_ERROR(inner_prox(grad, -1.0, gaussian(8, 3)), kInvalidArgument);
}

TEST(Problems, GradientCounterIsExact) {
  const QuadraticProblem f = random_quadratic(3, RateBudget::finite(1.0, 2.0), 0);
  GradientCounter grad(f);
  for (int i = 0; i < 17; ++i) grad(f.x_star());
  EXPECT_EQ(grad.count(), 17);
}

TEST(Problems, ResidualNormExamples) {
  const auto h = random_piecewise_quadratic(1, RateBudget::finite(1.0, 2.0), 0);
  const CompositeProblem c(h, 1.0);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  EXPECT_EQ(residual_norm(c, zero, Eigen::VectorXd::Constant(1, 0.5)), 0.0);
  EXPECT_EQ(residual_norm(c, zero, Eigen::VectorXd::Constant(1, 3.0)), 2.0);
  EXPECT_EQ(residual_norm(c, zero, Eigen::VectorXd::Constant(1, -3.0)), 2.0);
  EXPECT_EQ(residual_norm(c, Eigen::VectorXd::Constant(1, 0.2),
                          Eigen::VectorXd::Constant(1, -1.0)),
            0.0);
  EXPECT_EQ(residual_norm(c, Eigen::VectorXd::Constant(1, -0.2),
                          Eigen::VectorXd::Constant(1, -1.0)),
            2.0);
}

TEST(Problems, CompositeMinimizerHasZeroResidual) {
  for (std::uint64_t seed : {0u, 1u}) {
    const CompositeProblem c = random_composite(200, RateBudget::finite(0.1, 100.0), 1.0, seed);
    EXPECT_LT(residual_norm(c, c.x_star()), 1e-9);
    // nearby points are worse
    const Eigen::VectorXd x = c.x_star() + 1e-3 * gaussian(200, 77);
    EXPECT_GT(c.value(x), c.value(c.x_star()));
  }
}
