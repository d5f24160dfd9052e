#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "marginopt/transfer_matrix.hpp"

namespace marginopt {

// An n-periodic system seen through the lifted time index tau: block tau
// carries x[n tau], ..., x[n tau + n - 1].
struct LiftedSystem {
  int period;
  TransferMatrix G_tilde;
};

// Step k of the schedule produces block component k: x_k = x_{k-1} - steps[k-1]
// grad f(x_{k-1}), with x_0 meaning x_n of the previous block.
struct PeriodicGDSchedule {
  std::vector<double> steps;
};

// Same phase convention as PeriodicGDSchedule, entry 0 producing x_1.
struct Momentum2Schedule {
  std::array<double, 2> alpha{};
  std::array<double, 2> beta{};
  std::array<double, 2> eta{};
};

// P_1..P_n with G(z) = sum_k z^{-(k-1)} P_k(z^n). Throws Improper.
std::vector<TransferFunction> polyphase(const TransferFunction& G, int n);

// (i, j) entry P_{i-j+1} on and below the diagonal, z^-1 P_{n+i-j+1} above.
LiftedSystem lift_lti(const TransferFunction& G, int n);
LiftedSystem lift_periodic_gd(const PeriodicGDSchedule& schedule);
LiftedSystem lift_momentum2(const Momentum2Schedule& schedule);

// Feedthrough matrix strictly lower triangular (|upper| < 1e-12).
// Throws ImproperEntry.
bool check_causal_structure(const LiftedSystem& sys);

struct AccumulatorCheck {
  bool ok;
  Eigen::VectorXd residue;  // ((z-1) G_tilde(z) 1)(1)
};
// Simple accumulator seen along the all-ones direction: the residue vector is
// finite and nonzero in every coordinate. Throws HigherOrderPole.
AccumulatorCheck check_accumulator_direction(const LiftedSystem& sys);

// |p|^{-2n} > g(k1, k2)^{2n}.
bool periodic_margin_condition(Complex p, double k1, double k2, int n);

using GradientFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Closed-loop simulation of the lifted system with u = -grad f(x), started
// from a constant prehistory x = x0 with zero past inputs. Returns the scalar
// trajectory x[0], ..., x[n*outer_steps - 1]. Throws NotStrictlyCausal when
// the feedthrough is not strictly lower triangular.
std::vector<Eigen::VectorXd> simulate_lifted(const LiftedSystem& sys,
                                             const GradientFn& gradient,
                                             const Eigen::VectorXd& x0,
                                             int outer_steps);

// Direct time-varying recursions with the same phase and prehistory
// conventions.
std::vector<Eigen::VectorXd> simulate_periodic_gd(
    const PeriodicGDSchedule& schedule, const GradientFn& gradient,
    const Eigen::VectorXd& x0, int steps);
std::vector<Eigen::VectorXd> simulate_momentum2(
    const Momentum2Schedule& schedule, const GradientFn& gradient,
    const Eigen::VectorXd& x0, int steps);

}  // namespace marginopt
