#include "marginopt/gain_margin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "marginopt/error.hpp"

namespace marginopt {
namespace {

using CPoly = std::vector<Complex>;  // ascending

CPoly cmul(const CPoly& a, const CPoly& b) {
  CPoly c(a.size() + b.size() - 1, Complex(0.0, 0.0));
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

CPoly cadd(const CPoly& a, const CPoly& b) {
  CPoly c(std::max(a.size(), b.size()), Complex(0.0, 0.0));
  for (size_t i = 0; i < a.size(); ++i) c[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) c[i] += b[i];
  return c;
}

CPoly cscale(Complex s, CPoly a) {
  for (auto& v : a) v *= s;
  return a;
}

// Disk point of a node: 1/z, with infinity landing on 0.
Complex disk_point(const InterpolationNode& n) {
  return n.at_infinity ? Complex(0.0, 0.0) : 1.0 / n.node;
}

void validate_nodes(const std::vector<InterpolationNode>& nodes) {
  if (nodes.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no interpolation nodes");
  }
  for (const auto& n : nodes) {
    if (!n.at_infinity && !(std::abs(n.node) > 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "interpolation node must satisfy |z| > 1");
    }
    if (!(std::abs(n.value) < 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "interpolation value must satisfy |w| < 1");
    }
  }
  for (size_t i = 0; i < nodes.size(); ++i) {
    for (size_t j = i + 1; j < nodes.size(); ++j) {
      if (std::abs(disk_point(nodes[i]) - disk_point(nodes[j])) < 1e-12) {
        throw Error(ErrorCode::kDuplicateNode, "duplicate interpolation node");
      }
    }
  }
}

std::vector<double> logspace(double a, double b, int n) {
  std::vector<double> out(static_cast<size_t>(n));
  if (n == 1) {
    out[0] = a;
    return out;
  }
  const double la = std::log(a), lb = std::log(b);
  for (int i = 0; i < n; ++i) {
    out[static_cast<size_t>(i)] = std::exp(la + (lb - la) * i / (n - 1));
  }
  out.front() = a;
  out.back() = b;
  return out;
}

}  // namespace

void MarginSpec::validate() const {
  if (!(std::abs(p) > 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "nominal pole must satisfy |p| > 1");
  }
  if (!(k1 > 0.0) || !(k1 < 1.0) || !(k2 > 1.0)) {
    throw Error(ErrorCode::kBadInterval, "gain interval must satisfy 0 < k1 < 1 < k2");
  }
}

double g_of(double k1, double k2) {
  if (!(k1 > 0.0) || !(k2 > k1)) {
    throw Error(ErrorCode::kBadInterval, "g_of needs 0 < k1 < k2");
  }
  const double r = std::sqrt(k2 / k1);
  return (r - 1.0) / (r + 1.0);
}

bool in_forbidden_set(Complex zeta, double k1, double k2) {
  if (std::abs(zeta.imag()) > 1e-14 * (1.0 + std::abs(zeta))) return false;
  const double x = zeta.real();
  if (x == 0.0) return false;
  const double k = 1.0 - 1.0 / x;
  return k >= k1 && k <= k2;
}

Complex phi_forward(Complex zeta, double k1, double k2) {
  if (!(k1 > 0.0) || !(k2 > k1)) {
    throw Error(ErrorCode::kBadInterval, "phi_forward needs 0 < k1 < k2");
  }
  if (in_forbidden_set(zeta, k1, k2)) {
    throw Error(ErrorCode::kForbiddenValue,
                "value lies in the destabilizing set");
  }
  const Complex phi = (1.0 + (k1 - 1.0) * zeta) / (1.0 + (k2 - 1.0) * zeta);
  const Complex v = std::sqrt(phi);
  return (1.0 - v) / (1.0 + v);
}

Complex phi_inverse(Complex u, double k1, double k2) {
  if (!(k1 > 0.0) || !(k2 > k1)) {
    throw Error(ErrorCode::kBadInterval, "phi_inverse needs 0 < k1 < k2");
  }
  if (!(std::abs(u) < 1.0)) {
    throw Error(ErrorCode::kOutsideDisk, "phi_inverse needs |u| < 1");
  }
  if (u == Complex(0.0, 0.0)) return {0.0, 0.0};
  const double a = (k2 - k1) / 4.0;
  const double c = 1.0 - (k1 + k2) / 2.0;
  return 1.0 / (a * (u + 1.0 / u) + c);
}

TransferFunction phi_inverse(const TransferFunction& u, double k1, double k2) {
  if (!(k1 > 0.0) || !(k2 > k1)) {
    throw Error(ErrorCode::kBadInterval, "phi_inverse needs 0 < k1 < k2");
  }
  if (u.is_zero()) return TransferFunction();
  const double a = (k2 - k1) / 4.0;
  const double c = 1.0 - (k1 + k2) / 2.0;
  const Polynomial& n = u.num();
  const Polynomial& d = u.den();
  return TransferFunction(n * d, a * (n * n + d * d) + c * (n * d)).reduced();
}

bool margin_feasible(const MarginSpec& spec) {
  spec.validate();
  if (!spec.zero_at_infinity) return true;
  return g_of(spec.k1, spec.k2) < 1.0 / std::abs(spec.p);
}

double optimal_margin(Complex p) {
  const double r = std::abs(p);
  if (!(r > 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "nominal pole must satisfy |p| > 1");
  }
  const double s = (r + 1.0) / (r - 1.0);
  return s * s;
}

InterpolationNode InterpolationNode::infinity(Complex value) {
  return {true, Complex(0.0, 0.0), value};
}

InterpolationNode InterpolationNode::finite(Complex node, Complex value) {
  return {false, node, value};
}

PickMatrix pick_feasible(const std::vector<InterpolationNode>& nodes) {
  validate_nodes(nodes);
  const auto m = static_cast<Eigen::Index>(nodes.size());
  PickMatrix out;
  out.matrix.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto& a = nodes[static_cast<size_t>(i)];
      const auto& b = nodes[static_cast<size_t>(j)];
      const Complex zi = disk_point(a), zj = disk_point(b);
      out.matrix(i, j) = (1.0 - a.value * std::conj(b.value)) /
                         (1.0 - zi * std::conj(zj));
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(out.matrix,
                                                         Eigen::EigenvaluesOnly);
  out.eigenvalues = solver.eigenvalues();
  const double largest = out.eigenvalues.cwiseAbs().maxCoeff();
  out.feasible = out.eigenvalues.minCoeff() > 1e-10 * largest;
  return out;
}

TransferFunction np_solve(const std::vector<InterpolationNode>& nodes) {
  if (!pick_feasible(nodes).feasible) {
    throw Error(ErrorCode::kInfeasible, "Pick matrix is not positive definite");
  }
  const size_t m = nodes.size();
  std::vector<Complex> zeta(m), w(m);
  for (size_t i = 0; i < m; ++i) {
    zeta[i] = disk_point(nodes[i]);
    w[i] = nodes[i].value;
  }
  // Forward sweep: peel node k off, leaving data for the next Schur function.
  std::vector<Complex> head(m);
  for (size_t k = 0; k < m; ++k) {
    head[k] = w[k];
    if (std::abs(w[k]) >= 1.0) {
      throw Error(ErrorCode::kInfeasible, "Schur parameter left the disk");
    }
    for (size_t i = k + 1; i < m; ++i) {
      const Complex mobius = (w[i] - w[k]) / (1.0 - std::conj(w[k]) * w[i]);
      const Complex blaschke =
          (zeta[i] - zeta[k]) / (1.0 - std::conj(zeta[k]) * zeta[i]);
      w[i] = mobius / blaschke;
    }
  }
  // Backward sweep from the central choice F_m = 0.
  CPoly num{Complex(0.0, 0.0)};
  CPoly den{Complex(1.0, 0.0)};
  for (size_t kk = m; kk-- > 0;) {
    const CPoly bn{-zeta[kk], Complex(1.0, 0.0)};
    const CPoly bd{Complex(1.0, 0.0), -std::conj(zeta[kk])};
    const CPoly bdd = cmul(bd, den);
    const CPoly bnn = cmul(bn, num);
    CPoly next_num = cadd(cscale(head[kk], bdd), bnn);
    CPoly next_den = cadd(bdd, cscale(std::conj(head[kk]), bnn));
    num = std::move(next_num);
    den = std::move(next_den);
  }
  // F(zeta) -> T(z) = F(1/z): reverse over a common length.
  const size_t len = std::max(num.size(), den.size());
  num.resize(len, Complex(0.0, 0.0));
  den.resize(len, Complex(0.0, 0.0));
  std::reverse(num.begin(), num.end());
  std::reverse(den.begin(), den.end());

  Complex scale(0.0, 0.0);
  for (const auto& c : den) {
    if (std::abs(c) > std::abs(scale)) scale = c;
  }
  double magnitude = 0.0;
  for (auto* poly : {&num, &den}) {
    for (auto& c : *poly) {
      c /= scale;
      magnitude = std::max(magnitude, std::abs(c));
    }
  }
  std::vector<double> rn(len), rd(len);
  for (size_t i = 0; i < len; ++i) {
    if (std::abs(num[i].imag()) > 1e-9 * magnitude ||
        std::abs(den[i].imag()) > 1e-9 * magnitude) {
      throw Error(ErrorCode::kInvalidArgument,
                  "interpolation data do not admit a real-rational solution");
    }
    rn[i] = num[i].real();
    rd[i] = den[i].real();
  }
  return TransferFunction(Polynomial(rn), Polynomial(rd)).reduced();
}

TransferFunction recover_controller(const TransferFunction& T,
                                    const TransferFunction& P0) {
  if (P0.is_zero()) {
    throw Error(ErrorCode::kInvalidArgument, "nominal plant is zero");
  }
  if (T.is_zero()) return TransferFunction();
  const TransferFunction one_minus = (1.0 + (-T)).reduced();
  if (one_minus.is_zero()) {
    throw Error(ErrorCode::kDegenerate,
                "complementary sensitivity is identically one");
  }
  return (T / (P0 * one_minus)).reduced();
}

MarginDesign design_margin_controller(double p, double k1, double k2) {
  MarginSpec spec{Complex(p, 0.0), k1, k2, true};
  spec.validate();
  const double g = g_of(k1, k2);
  if (!(g < 1.0 / std::abs(p))) {
    throw Error(ErrorCode::kInfeasible,
                "requested gain interval exceeds the optimal margin");
  }
  MarginDesign d;
  d.P0 = TransferFunction(Polynomial::constant(1.0), Polynomial({-p, 1.0}));
  d.bold_T = np_solve({InterpolationNode::infinity(0.0),
                       InterpolationNode::finite(p, g)});
  d.T = phi_inverse(d.bold_T, k1, k2);
  d.C = recover_controller(d.T, d.P0);
  return d;
}

Polynomial gain_charpoly(const TransferFunction& P0, const TransferFunction& C,
                         double k) {
  return P0.den() * C.den() + k * (P0.num() * C.num());
}

bool margin_verify(const TransferFunction& P0, const TransferFunction& C,
                   double k1, double k2, int grid) {
  if (!(k1 > 0.0) || !(k2 >= k1)) {
    throw Error(ErrorCode::kBadInterval, "margin_verify needs 0 < k1 <= k2");
  }
  if (grid < 1) {
    throw Error(ErrorCode::kInvalidArgument, "grid must be positive");
  }
  const Polynomial nominal = gain_charpoly(P0, C, 1.0);
  if (nominal.is_zero() || !(spectral_radius(nominal) < 1.0)) {
    throw Error(ErrorCode::kNominalUnstable, "nominal closed loop is unstable");
  }
  for (double k : logspace(k1, k2, grid)) {
    const Polynomial cp = gain_charpoly(P0, C, k);
    if (cp.is_zero() || !(spectral_radius(cp) < 1.0)) return false;
  }
  return true;
}

}  // namespace marginopt
