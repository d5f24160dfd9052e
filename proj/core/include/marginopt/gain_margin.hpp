#pragma once

#include <vector>

#include <Eigen/Dense>

#include "marginopt/transfer_function.hpp"

namespace marginopt {

// Plant family k * P0 with k in [k1, k2], P0 having the unstable pole p.
struct MarginSpec {
  Complex p;
  double k1 = 0.0;
  double k2 = 0.0;
  bool zero_at_infinity = true;  // P0 strictly causal

  void validate() const;
};

// (sqrt(k2/k1) - 1)/(sqrt(k2/k1) + 1). Throws BadInterval.
double g_of(double k1, double k2);

// zeta is excluded iff it is real and k = 1 - 1/zeta falls inside [k1, k2]:
// those are the values T(z) = -1/(k-1) that destabilize k*P0.
bool in_forbidden_set(Complex zeta, double k1, double k2);

// Maps the admissible T-plane onto the unit disk (principal square root).
// Throws ForbiddenValue.
Complex phi_forward(Complex zeta, double k1, double k2);
// Throws OutsideDisk for |u| >= 1.
Complex phi_inverse(Complex u, double k1, double k2);

// Substitutes a rational u(z) into phi_inverse, giving T(z) = phi^-1(u(z)).
TransferFunction phi_inverse(const TransferFunction& u, double k1, double k2);

bool margin_feasible(const MarginSpec& spec);
// Supremum of k2/k1 over feasible intervals, ((|p|+1)/(|p|-1))^2.
double optimal_margin(Complex p);

struct InterpolationNode {
  bool at_infinity = false;
  Complex node;  // ignored when at_infinity
  Complex value;

  static InterpolationNode infinity(Complex value);
  static InterpolationNode finite(Complex node, Complex value);
};

struct PickMatrix {
  Eigen::MatrixXcd matrix;
  Eigen::VectorXd eigenvalues;  // ascending
  bool feasible = false;
};

// Pick matrix of the data after z -> 1/z moves |z| > 1 into the unit disk.
// Throws DuplicateNode, InvalidArgument for nodes with |z| <= 1 or values
// with |w| >= 1.
PickMatrix pick_feasible(const std::vector<InterpolationNode>& nodes);

// Schur recursion with the zero (central) parameter at the last step.
// Result is real-rational; throws Infeasible, or InvalidArgument when the
// data are not conjugate-symmetric enough to give real coefficients.
TransferFunction np_solve(const std::vector<InterpolationNode>& nodes);

// C = T / (P0 (1 - T)). Throws Degenerate if T == 1 identically.
TransferFunction recover_controller(const TransferFunction& T,
                                    const TransferFunction& P0);

// The interpolation-based optimal design for P0 = 1/(z - p) with real p:
// T = phi^-1(g p / z), C recovered from T.
struct MarginDesign {
  TransferFunction P0;
  TransferFunction bold_T;  // g p / z
  TransferFunction T;
  TransferFunction C;
};
MarginDesign design_margin_controller(double p, double k1, double k2);

// Closed-loop stability of k*P0 with C for `grid` log-spaced k in [k1, k2].
// Throws NominalUnstable when the k = 1 loop is unstable.
bool margin_verify(const TransferFunction& P0, const TransferFunction& C,
                   double k1, double k2, int grid);

// Closed-loop characteristic polynomial den_P den_C + k num_P num_C.
Polynomial gain_charpoly(const TransferFunction& P0, const TransferFunction& C,
                         double k);

}  // namespace marginopt
