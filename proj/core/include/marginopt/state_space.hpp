#pragma once

#include <Eigen/Dense>

#include "marginopt/transfer_matrix.hpp"

namespace marginopt {

// x+ = A x + B u,  y = C x + D u.
struct StateSpace {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  Eigen::MatrixXd D;

  int states() const { return static_cast<int>(A.rows()); }
  int inputs() const { return static_cast<int>(B.cols()); }
  int outputs() const { return static_cast<int>(C.rows()); }

  // C (zI - A)^{-1} B + D.
  Eigen::MatrixXcd eval(Complex z) const;
};

// Controllable canonical form of G = D + N_r/den: A has ones on the
// superdiagonal and -a_0..-a_{n-1} in its last row, B = e_n, C holds the
// remainder numerator coefficients. Throws Improper.
StateSpace realize(const TransferFunction& G);

// Each entry realized separately and stacked block-diagonally; input j drives
// every entry in column j, output i sums row i.
StateSpace realize(const TransferMatrix& G);

}  // namespace marginopt
