#include "marginopt/state_space.hpp"

#include <vector>

#include "marginopt/error.hpp"

namespace marginopt {

Eigen::MatrixXcd StateSpace::eval(Complex z) const {
  const int n = states();
  Eigen::MatrixXcd out = D.cast<Complex>();
  if (n == 0) return out;
  Eigen::MatrixXcd resolvent =
      z * Eigen::MatrixXcd::Identity(n, n) - A.cast<Complex>();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(resolvent);
  out += C.cast<Complex>() * lu.solve(B.cast<Complex>());
  return out;
}

StateSpace realize(const TransferFunction& G) {
  if (!G.is_proper()) {
    throw Error(ErrorCode::kImproper, "cannot realize an improper function");
  }
  const double d = feedthrough(G);
  const Polynomial& den = G.den();  // monic
  const int n = den.degree();
  const Polynomial rem = G.num() - d * den;

  StateSpace ss;
  ss.A = Eigen::MatrixXd::Zero(n, n);
  ss.B = Eigen::MatrixXd::Zero(n, 1);
  ss.C = Eigen::MatrixXd::Zero(1, n);
  ss.D = Eigen::MatrixXd::Constant(1, 1, d);
  if (n == 0) return ss;
  for (int i = 0; i + 1 < n; ++i) ss.A(i, i + 1) = 1.0;
  for (int j = 0; j < n; ++j) {
    ss.A(n - 1, j) = -den[j];
    ss.C(0, j) = rem[j];
  }
  ss.B(n - 1, 0) = 1.0;
  return ss;
}

StateSpace realize(const TransferMatrix& G) {
  std::vector<StateSpace> parts;
  int total = 0;
  for (const auto& e : G.entries()) {
    parts.push_back(realize(e));
    total += parts.back().states();
  }
  StateSpace ss;
  ss.A = Eigen::MatrixXd::Zero(total, total);
  ss.B = Eigen::MatrixXd::Zero(total, G.cols());
  ss.C = Eigen::MatrixXd::Zero(G.rows(), total);
  ss.D = Eigen::MatrixXd::Zero(G.rows(), G.cols());
  int offset = 0;
  for (int i = 0; i < G.rows(); ++i) {
    for (int j = 0; j < G.cols(); ++j) {
      const StateSpace& p = parts[static_cast<size_t>(i * G.cols() + j)];
      const int k = p.states();
      if (k > 0) {
        ss.A.block(offset, offset, k, k) = p.A;
        ss.B.block(offset, j, k, 1) = p.B;
        ss.C.block(i, offset, 1, k) = p.C;
      }
      ss.D(i, j) = p.D(0, 0);
      offset += k;
    }
  }
  return ss;
}

}  // namespace marginopt
