#include "marginopt/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "marginopt/error.hpp"

namespace marginopt {
namespace {

TransferMatrix diag2(double a, double b) {
  TransferMatrix m(2, 2);
  m(0, 0) = TransferFunction::constant(a);
  m(1, 1) = TransferFunction::constant(b);
  return m;
}

void require_2x2(const TransferMatrix& m) {
  if (m.rows() != 2 || m.cols() != 2) {
    throw Error(ErrorCode::kInvalidArgument, "splitting transforms act on 2x2 matrices");
  }
}

bool poles_inside(const TransferFunction& tf, double gamma) {
  for (const Complex& p : tf.reduced().den().roots()) {
    if (!(std::abs(p) < gamma)) return false;
  }
  return true;
}

// Smallest value of the Hermitian-part functional over an N-point circle.
template <typename Eval>
double min_hermitian(const Eval& eval, double gamma, int N) {
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < N; ++k) {
    const Complex z = std::polar(gamma, 2.0 * std::numbers::pi * k / N);
    worst = std::min(worst, eval(z));
  }
  return worst;
}

// Grid check with one automatic refinement near the threshold.
template <typename Eval>
bool grid_check(const Eval& eval, double gamma, double threshold,
                const SPRConfig& config) {
  double value = min_hermitian(eval, gamma, config.grid_points);
  if (value >= threshold && value < 10.0 * threshold) {
    value = min_hermitian(eval, gamma, 2 * config.grid_points);
  }
  return value >= threshold;
}

}  // namespace

void SPRConfig::validate() const {
  if (grid_points < 64) {
    throw Error(ErrorCode::kInvalidArgument, "SPR grid needs at least 64 points");
  }
  if (!(epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "SPR epsilon must be positive");
  }
}

void SectorBound::validate() const {
  if (!(k1 >= 0.0) || !(k2 > k1)) {
    throw Error(ErrorCode::kBadInterval, "sector needs 0 <= k1 < k2");
  }
}

TransferFunction loop_transform(const TransferFunction& G,
                                const RateBudget& budget) {
  const double mu = budget.mu(), ell = budget.ell();
  const Polynomial& n = G.num();
  const Polynomial& d = G.den();
  const Polynomial bottom = d + mu * n;
  if (bottom.is_zero()) {
    throw Error(ErrorCode::kSingularTransform, "1 + mu G vanishes identically");
  }
  return TransferFunction(d + ell * n, bottom).reduced();
}

TransferFunction inverse_loop_transform(const TransferFunction& Psi,
                                        const RateBudget& budget) {
  const double mu = budget.mu(), ell = budget.ell();
  const Polynomial& n = Psi.num();
  const Polynomial& d = Psi.den();
  const Polynomial bottom = ell * d - mu * n;
  if (bottom.is_zero()) {
    throw Error(ErrorCode::kSingularTransform, "ell - mu Psi vanishes identically");
  }
  return TransferFunction(n - d, bottom).reduced();
}

bool same_den(const Polynomial& a, const Polynomial& b) {
  const double scale = std::max(a.max_abs_coeff(), b.max_abs_coeff());
  return a.approx_equal(b, 1e-15 * scale);
}

// a * d / bottom, cancelling d against the denominator of a when they agree.
TransferFunction times_ratio(const TransferFunction& a, const Polynomial& d,
                             const Polynomial& bottom) {
  if (same_den(a.den(), d)) return TransferFunction(a.num(), bottom).reduced();
  return (a * TransferFunction(d, bottom)).reduced();
}

// c + k a b, over the common denominator when c and a share one.
TransferFunction add_product(const TransferFunction& c, double k,
                             const TransferFunction& a, const TransferFunction& b) {
  if (same_den(c.den(), a.den())) {
    return TransferFunction(c.num() * b.den() + k * (a.num() * b.num()),
                            a.den() * b.den())
        .reduced();
  }
  return (c + k * (a * b)).reduced();
}

// E, L, M are diagonal, so both maps reduce to scalar operations on the
// entries; this avoids the degree growth of a generic matrix inverse.
TransferMatrix loop_transform_split(const TransferMatrix& G,
                                    const RateBudget& budget) {
  require_2x2(G);
  const double mu = budget.mu(), ell = budget.ell();
  const TransferFunction& g11 = G(0, 0);
  const Polynomial bottom = g11.den() + mu * g11.num();
  if (bottom.is_zero()) {
    throw Error(ErrorCode::kSingularTransform, "1 + mu G11 vanishes identically");
  }
  // entries of column 2 of (I + M G)^-1 pick up 1/(1 + mu G11) = d11/bottom
  TransferMatrix psi(2, 2);
  psi(0, 0) = TransferFunction(g11.den() + ell * g11.num(), bottom).reduced();
  psi(0, 1) = (ell - mu) * times_ratio(G(0, 1), g11.den(), bottom);
  psi(1, 0) = times_ratio(G(1, 0), g11.den(), bottom);
  psi(1, 1) = add_product(G(1, 1), -mu, G(0, 1), psi(1, 0));
  return psi;
}

TransferMatrix inverse_loop_transform_split(const TransferMatrix& Psi,
                                            const RateBudget& budget) {
  require_2x2(Psi);
  const double mu = budget.mu(), ell = budget.ell();
  const TransferFunction& p11 = Psi(0, 0);
  const Polynomial bottom = ell * p11.den() - mu * p11.num();
  if (bottom.is_zero()) {
    throw Error(ErrorCode::kSingularTransform, "ell - mu Psi11 vanishes identically");
  }
  // 1/(ell - mu Psi11) = d11/bottom
  TransferMatrix g(2, 2);
  g(0, 0) = TransferFunction(p11.num() - p11.den(), bottom).reduced();
  g(0, 1) = times_ratio(Psi(0, 1), p11.den(), bottom);
  g(1, 0) = (ell - mu) * times_ratio(Psi(1, 0), p11.den(), bottom);
  g(1, 1) = add_product(Psi(1, 1), mu / (ell - mu), Psi(0, 1), g(1, 0));
  return g;
}

TransferFunction circle_psi(const RateBudget& budget, double rho) {
  if (!(rho > 0.0) || !(rho < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "rate must lie in (0, 1)");
  }
  const double c = budget.kappa() * (1.0 - rho) / (1.0 + rho);
  return TransferFunction(Polynomial({c * rho, c}), Polynomial({-rho, 1.0}));
}

bool spr_check(const TransferFunction& Psi, double gamma,
               const SPRConfig& config) {
  config.validate();
  if (!(gamma > 0.0) || gamma > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "gamma must lie in (0, 1]");
  }
  if (!poles_inside(Psi, gamma)) return false;
  auto eval = [&](Complex z) { return Psi(z).real(); };
  return grid_check(eval, gamma, config.epsilon / 2.0, config);
}

bool spr_check(const TransferMatrix& Psi, double gamma,
               const SPRConfig& config) {
  config.validate();
  if (!(gamma > 0.0) || gamma > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "gamma must lie in (0, 1]");
  }
  if (Psi.rows() != Psi.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "SPR check needs a square matrix");
  }
  for (const auto& e : Psi.entries()) {
    if (!poles_inside(e, gamma)) return false;
  }
  auto eval = [&](Complex z) {
    const Eigen::MatrixXcd v = Psi.eval(z);
    const Eigen::MatrixXcd h = v + v.adjoint();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
  };
  return grid_check(eval, gamma, config.epsilon, config);
}

double rate_certificate(const TransferFunction& G, const RateBudget& budget,
                        const SPRConfig& config) {
  const TransferFunction psi = loop_transform(G, budget);
  if (!spr_check(psi, 1.0, config)) {
    throw Error(ErrorCode::kUncertifiable,
                "loop-transformed system is not SPR on the unit circle");
  }
  auto ok = [&](double rho) {
    for (int k = 32; k >= 1; --k) {
      const double gamma =
          rho + (1.0 - rho) * std::pow(10.0, -5.0 + 5.0 * (k - 1) / 31.0);
      if (!spr_check(psi, std::min(gamma, 1.0), config)) return false;
    }
    return true;
  };
  double lo = 0.0, hi = 1.0;
  if (ok(0.0)) return 0.0;
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    if (ok(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

ScaledSPRResult scaled_spr_search(const TransferMatrix& Psi, double gamma,
                                  const std::vector<double>& w_grid,
                                  const SPRConfig& config) {
  require_2x2(Psi);
  if (w_grid.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "w grid is empty");
  }
  for (double w : w_grid) {
    if (w == 0.0) throw Error(ErrorCode::kInvalidArgument, "w must be nonzero");
    TransferMatrix scaled = Psi;
    scaled(0, 1) = w * Psi(0, 1);
    scaled(1, 0) = (1.0 / w) * Psi(1, 0);
    if (spr_check(scaled, gamma, config)) return {true, w};
  }
  return {false, 0.0};
}

CaratheodoryPick caratheodory_pick(const Eigen::Matrix2d& P1,
                                   const Eigen::Matrix2d& Pinf, double gamma) {
  if (!(gamma > 0.0) || !(gamma < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gamma must lie in (0, 1)");
  }
  CaratheodoryPick out;
  out.Lambda.block<2, 2>(0, 0) = (P1 + P1.transpose()) / (1.0 - gamma * gamma);
  out.Lambda.block<2, 2>(0, 2) = P1 + Pinf.transpose();
  out.Lambda.block<2, 2>(2, 0) = P1.transpose() + Pinf;
  out.Lambda.block<2, 2>(2, 2) = Pinf + Pinf.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> solver(out.Lambda,
                                                        Eigen::EigenvaluesOnly);
  out.eigenvalues = solver.eigenvalues();
  const double largest = out.eigenvalues.cwiseAbs().maxCoeff();
  out.feasible = out.eigenvalues(0) > 1e-10 * largest;
  return out;
}

SplittingPickData splitting_pick_data(const RateBudget& budget, double eta1,
                                      double eta2, double w) {
  if (w == 0.0) throw Error(ErrorCode::kInvalidArgument, "w must be nonzero");
  const double mu = budget.mu(), ell = budget.ell();
  Eigen::Matrix2d psi1;
  psi1 << ell / mu, (ell - mu) / mu, 1.0 / mu, 1.0 / mu;
  Eigen::Matrix2d psi_inf;
  psi_inf << 1.0, (ell - mu) * eta1, 0.0, eta2;
  const Eigen::Matrix2d S = Eigen::Vector2d(w, 1.0).asDiagonal();
  const Eigen::Matrix2d Sinv = Eigen::Vector2d(1.0 / w, 1.0).asDiagonal();
  return {S * psi1 * Sinv, S * psi_inf * Sinv};
}

bool verify_sector(const VectorMap& phi, const SectorBound& bound, int samples,
                   int dim, std::uint64_t seed) {
  bound.validate();
  if (samples < 1 || dim < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need samples >= 1 and dim >= 1");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const bool unbounded = std::isinf(bound.k2);
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd x(dim);
    for (int i = 0; i < dim; ++i) x(i) = normal(rng);
    const double norm = x.norm();
    if (norm == 0.0) continue;
    const double radius = std::pow(10.0, -3.0 + 5.0 * (s % 11) / 10.0);
    x *= radius / norm;
    const Eigen::VectorXd v = phi(x);
    const double xx = x.squaredNorm();
    if (unbounded) {
      const double tol = 1e-12 * std::max(1.0, bound.k1) * xx;
      if ((v - bound.k1 * x).dot(x) < -tol) return false;
    } else {
      const double tol = 1e-12 * std::max(1.0, bound.k2 * bound.k2) * xx;
      if ((v - bound.k1 * x).dot(v - bound.k2 * x) > tol) return false;
    }
  }
  return true;
}

bool verify_sector_grid(const std::function<double(double)>& phi,
                        const SectorBound& bound, int points, double radius) {
  bound.validate();
  if (points < 2 || !(radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "need points >= 2 and radius > 0");
  }
  const bool unbounded = std::isinf(bound.k2);
  for (int i = 0; i < points; ++i) {
    const double x = -radius + 2.0 * radius * i / (points - 1);
    if (x == 0.0) continue;
    const double v = phi(x);
    if (unbounded) {
      if ((v - bound.k1 * x) * x < -1e-12 * std::max(1.0, bound.k1) * x * x) {
        return false;
      }
    } else {
      const double tol = 1e-12 * std::max(1.0, bound.k2 * bound.k2) * x * x;
      if ((v - bound.k1 * x) * (v - bound.k2 * x) > tol) return false;
    }
  }
  return true;
}

}  // namespace marginopt
