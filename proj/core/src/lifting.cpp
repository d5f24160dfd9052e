#include "marginopt/lifting.hpp"

#include <cmath>
#include <numbers>

#include "marginopt/error.hpp"
#include "marginopt/gain_margin.hpp"
#include "marginopt/state_space.hpp"

namespace marginopt {
namespace {

using CPoly = std::vector<Complex>;

CPoly cmul(const CPoly& a, const CPoly& b) {
  CPoly c(a.size() + b.size() - 1, Complex(0.0, 0.0));
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

CPoly to_complex(const Polynomial& p) {
  CPoly out;
  for (double c : p.coeffs()) out.emplace_back(c, 0.0);
  return out;
}

const TransferFunction& z_inverse() {
  static const TransferFunction d = TransferFunction::delay();
  return d;
}

}  // namespace

std::vector<TransferFunction> polyphase(const TransferFunction& G, int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "period must be >= 1");
  if (!G.is_proper()) {
    throw Error(ErrorCode::kImproper, "polyphase needs a proper function");
  }
  if (n == 1) return {G};
  // E(z) = prod_{k=1}^{n-1} D(w^k z) makes D E a polynomial in z^n.
  const CPoly den = to_complex(G.den());
  CPoly e{Complex(1.0, 0.0)};
  for (int k = 1; k < n; ++k) {
    const Complex w = std::polar(1.0, 2.0 * std::numbers::pi * k / n);
    CPoly rotated = den;
    Complex wp(1.0, 0.0);
    for (auto& c : rotated) {
      c *= wp;
      wp *= w;
    }
    e = cmul(e, rotated);
  }
  const CPoly de = cmul(den, e);
  const CPoly ne = cmul(to_complex(G.num()), e);

  std::vector<double> dtilde(de.size() / static_cast<size_t>(n) + 1, 0.0);
  for (size_t c = 0; c < de.size(); c += static_cast<size_t>(n)) {
    dtilde[c / static_cast<size_t>(n)] = de[c].real();
  }
  std::vector<std::vector<double>> parts(
      static_cast<size_t>(n), std::vector<double>(dtilde.size() + 1, 0.0));
  for (size_t c = 0; c < ne.size(); ++c) {
    const size_t q = c / static_cast<size_t>(n);
    const size_t s = c % static_cast<size_t>(n);
    if (s == 0) {
      parts[0][q] += ne[c].real();
    } else {
      parts[static_cast<size_t>(n) - s][q + 1] += ne[c].real();
    }
  }
  const Polynomial D(dtilde);
  std::vector<TransferFunction> out;
  out.reserve(static_cast<size_t>(n));
  for (auto& p : parts) out.push_back(TransferFunction(Polynomial(p), D).reduced());
  return out;
}

LiftedSystem lift_lti(const TransferFunction& G, int n) {
  const std::vector<TransferFunction> P = polyphase(G, n);
  TransferMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i >= j) {
        m(i, j) = P[static_cast<size_t>(i - j)];
      } else {
        m(i, j) = (z_inverse() * P[static_cast<size_t>(n + i - j)]).reduced();
      }
    }
  }
  return {n, m};
}

LiftedSystem lift_periodic_gd(const PeriodicGDSchedule& schedule) {
  const int n = static_cast<int>(schedule.steps.size());
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "empty schedule");
  for (double a : schedule.steps) {
    if (!(a > 0.0)) throw Error(ErrorCode::kInvalidArgument, "steps must be positive");
  }
  const Polynomial acc({-1.0, 1.0});
  TransferMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double a = schedule.steps[static_cast<size_t>((j + 1) % n)];
      m(i, j) = j < i ? TransferFunction(Polynomial({0.0, a}), acc)
                      : TransferFunction(Polynomial::constant(a), acc);
    }
  }
  return {n, m};
}

LiftedSystem lift_momentum2(const Momentum2Schedule& s) {
  const double b1 = s.beta[0], b2 = s.beta[1];
  if (!(std::abs(b1 * b2) < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "momentum product must satisfy |b1 b2| < 1");
  }
  const TransferFunction scale(Polynomial::constant(1.0),
                              Polynomial({-1.0, 1.0}) * Polynomial({-b1 * b2, 1.0}));
  TransferMatrix left(2, 2);
  left(0, 0) = TransferFunction(Polynomial({b2, 1.0}), Polynomial::constant(1.0));
  left(0, 1) = TransferFunction::constant(1.0 + b1);
  left(1, 0) = TransferFunction(Polynomial({0.0, 1.0 + b2}), Polynomial::constant(1.0));
  left(1, 1) = TransferFunction(Polynomial({b1, 1.0}), Polynomial::constant(1.0));
  TransferMatrix right(2, 2);
  right(0, 0) = TransferFunction::constant(s.eta[0]);
  right(0, 1) = TransferFunction::constant(s.alpha[0]);
  right(1, 0) = TransferFunction(Polynomial({0.0, s.alpha[1]}), Polynomial::constant(1.0));
  right(1, 1) = TransferFunction::constant(s.eta[1]);
  return {2, scale * (left * right)};
}

bool check_causal_structure(const LiftedSystem& sys) {
  const Eigen::MatrixXd D = feedthrough_matrix(sys.G_tilde);
  for (int i = 0; i < D.rows(); ++i) {
    for (int j = i; j < D.cols(); ++j) {
      if (std::abs(D(i, j)) >= 1e-12) return false;
    }
  }
  return true;
}

AccumulatorCheck check_accumulator_direction(const LiftedSystem& sys) {
  const TransferMatrix& G = sys.G_tilde;
  const TransferFunction accumulator(Polynomial({-1.0, 1.0}),
                                     Polynomial::constant(1.0));
  AccumulatorCheck out{true, Eigen::VectorXd::Zero(G.rows())};
  for (int i = 0; i < G.rows(); ++i) {
    TransferFunction row_sum;
    for (int j = 0; j < G.cols(); ++j) row_sum = (row_sum + G(i, j)).reduced();
    const TransferFunction h = (accumulator * row_sum).reduced();
    const double scale = h.den().magnitude_bound(1.0);
    if (std::abs(h.den()(1.0)) <= 1e-9 * scale) {
      throw Error(ErrorCode::kHigherOrderPole,
                  "pole at 1 of order above one along the ones direction");
    }
    out.residue(i) = h.num()(1.0) / h.den()(1.0);
    if (!(std::abs(out.residue(i)) > 1e-12)) out.ok = false;
  }
  return out;
}

bool periodic_margin_condition(Complex p, double k1, double k2, int n) {
  if (n < 1) throw Error(ErrorCode::kInvalidArgument, "period must be >= 1");
  if (!(std::abs(p) > 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "nominal pole must satisfy |p| > 1");
  }
  const double g = g_of(k1, k2);
  return std::pow(std::abs(p), -2.0 * n) > std::pow(g, 2.0 * n);
}

std::vector<Eigen::VectorXd> simulate_lifted(const LiftedSystem& sys,
                                             const GradientFn& gradient,
                                             const Eigen::VectorXd& x0,
                                             int outer_steps) {
  if (!check_causal_structure(sys)) {
    throw Error(ErrorCode::kNotStrictlyCausal,
                "lifted feedthrough is not strictly lower triangular");
  }
  const TransferMatrix& G = sys.G_tilde;
  const int n = G.rows();
  const StateSpace ss = realize(G);
  const auto d = x0.size();

  // Per-row equilibrium: put x0 on the accumulator state of one entry.
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(ss.states(), d);
  int offset = 0;
  std::vector<int> offsets;
  for (const auto& e : G.entries()) {
    offsets.push_back(offset);
    offset += e.den().degree();
  }
  for (int i = 0; i < n; ++i) {
    int best = -1;
    double best_gain = 0.0;
    for (int j = 0; j < n; ++j) {
      const TransferFunction& e = G(i, j);
      const int k = e.den().degree();
      if (k == 0) continue;
      if (std::abs(e.den()(1.0)) > 1e-9 * e.den().magnitude_bound(1.0)) continue;
      const int o = offsets[static_cast<size_t>(i * n + j)];
      const double gain = ss.C.block(i, o, 1, k).sum();
      if (std::abs(gain) > std::abs(best_gain)) {
        best_gain = gain;
        best = j;
      }
    }
    if (best < 0 || std::abs(best_gain) < 1e-12) {
      throw Error(ErrorCode::kInvalidArgument,
                  "row " + std::to_string(i) + " has no accumulator to hold x0");
    }
    const int o = offsets[static_cast<size_t>(i * n + best)];
    const int k = G(i, best).den().degree();
    S.block(o, 0, k, d) = Eigen::VectorXd::Ones(k) * x0.transpose() / best_gain;
  }

  std::vector<Eigen::VectorXd> traj;
  traj.reserve(static_cast<size_t>(n * outer_steps));
  Eigen::MatrixXd U(n, d);
  for (int tau = 0; tau < outer_steps; ++tau) {
    for (int i = 0; i < n; ++i) {
      Eigen::RowVectorXd y = ss.C.row(i) * S;
      for (int j = 0; j < i; ++j) y += ss.D(i, j) * U.row(j);
      const Eigen::VectorXd x = y.transpose();
      U.row(i) = -gradient(x).transpose();
      traj.push_back(x);
    }
    S = ss.A * S + ss.B * U;
  }
  return traj;
}

std::vector<Eigen::VectorXd> simulate_periodic_gd(
    const PeriodicGDSchedule& schedule, const GradientFn& gradient,
    const Eigen::VectorXd& x0, int steps) {
  const size_t n = schedule.steps.size();
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "empty schedule");
  std::vector<Eigen::VectorXd> traj{x0};
  for (int t = 0; t + 1 < steps; ++t) {
    const double a = schedule.steps[static_cast<size_t>(t + 1) % n];
    traj.push_back(traj.back() - a * gradient(traj.back()));
  }
  return traj;
}

std::vector<Eigen::VectorXd> simulate_momentum2(
    const Momentum2Schedule& s, const GradientFn& gradient,
    const Eigen::VectorXd& x0, int steps) {
  std::vector<Eigen::VectorXd> traj{x0};
  Eigen::VectorXd prev = x0;
  Eigen::VectorXd grad_prev = Eigen::VectorXd::Zero(x0.size());
  for (int t = 0; t + 1 < steps; ++t) {
    const size_t c = static_cast<size_t>(t + 1) % 2;
    const Eigen::VectorXd& x = traj.back();
    const Eigen::VectorXd grad = gradient(x);
    Eigen::VectorXd next = x - s.alpha[c] * grad - s.eta[c] * grad_prev +
                           s.beta[c] * (x - prev);
    prev = x;
    grad_prev = grad;
    traj.push_back(std::move(next));
  }
  return traj;
}

}  // namespace marginopt
