#pragma once

#include <vector>

#include <Eigen/Dense>

#include "marginopt/transfer_function.hpp"

namespace marginopt {

// rows x cols grid of scalar transfer functions, row-major.
class TransferMatrix {
 public:
  TransferMatrix(int rows, int cols);  // all-zero
  TransferMatrix(int rows, int cols, std::vector<TransferFunction> entries);

  static TransferMatrix identity(int n);
  static TransferMatrix constant(const Eigen::MatrixXd& m);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const std::vector<TransferFunction>& entries() const { return entries_; }
  const TransferFunction& operator()(int i, int j) const;
  TransferFunction& operator()(int i, int j);

  // Entry-wise evaluation; PoleEvaluation propagates from any entry.
  Eigen::MatrixXcd eval(Complex z) const;

  TransferMatrix reduced() const;
  TransferMatrix scaled_argument(double s) const;

  friend TransferMatrix operator+(const TransferMatrix& a,
                                  const TransferMatrix& b);
  friend TransferMatrix operator-(const TransferMatrix& a,
                                  const TransferMatrix& b);
  friend TransferMatrix operator*(const TransferMatrix& a,
                                  const TransferMatrix& b);
  friend TransferMatrix operator*(const TransferFunction& s,
                                  const TransferMatrix& m);

 private:
  int rows_;
  int cols_;
  std::vector<TransferFunction> entries_;
};

// Entry-wise G(infinity); throws ImproperEntry if any entry is improper.
Eigen::MatrixXd feedthrough_matrix(const TransferMatrix& m);

// Square matrices only, cofactor expansion (n is small everywhere it is used).
TransferFunction determinant(const TransferMatrix& m);
// Adjugate over determinant; throws SingularTransform when det is identically
// zero.
TransferMatrix inverse(const TransferMatrix& m);

}  // namespace marginopt
