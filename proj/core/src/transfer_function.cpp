#include "marginopt/transfer_function.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "marginopt/error.hpp"

namespace marginopt {
namespace {

bool same_coefficients(const Polynomial& a, const Polynomial& b) {
  if (a.degree() != b.degree()) return false;
  const double scale = std::max(a.max_abs_coeff(), b.max_abs_coeff());
  return a.approx_equal(b, 1e-15 * scale);
}

// Factor to deflate for a shared root m: (z - m) when m is real, the real
// quadratic with roots m, conj(m) otherwise.
Polynomial root_factor(Complex m) {
  if (std::abs(m.imag()) <= 1e-8 * (1.0 + std::abs(m))) {
    return Polynomial({-m.real(), 1.0});
  }
  return Polynomial({std::norm(m), -2.0 * m.real(), 1.0});
}

// Computed roots of a k-fold root scatter by about eps^(1/k); their mean is
// far more accurate than any single member.
Complex cluster_mean(const std::vector<Complex>& roots, Complex x) {
  Complex sum = 0.0;
  int count = 0;
  for (const Complex& r : roots) {
    if (std::abs(r - x) <= 1e-4 * (1.0 + std::abs(x))) {
      sum += r;
      ++count;
    }
  }
  return count > 0 ? sum / static_cast<double>(count) : x;
}

bool divides(const Polynomial& p, const Polynomial& factor, Polynomial* q) {
  auto [quot, rem] = Polynomial::divmod(p, factor);
  const double scale = std::max(p.max_abs_coeff(), 1e-300);
  if (rem.max_abs_coeff() > kCancellationTolerance * scale) return false;
  *q = quot;
  return true;
}

}  // namespace

TransferFunction::TransferFunction()
    : num_(Polynomial()), den_(Polynomial::constant(1.0)) {}

TransferFunction::TransferFunction(Polynomial num, Polynomial den)
    : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) {
    throw Error(ErrorCode::kInvalidArgument,
                "transfer function denominator is zero");
  }
  if (num_.degree() > kMaxTransferDegree ||
      den_.degree() > kMaxTransferDegree) {
    throw Error(ErrorCode::kDegreeLimit,
                "transfer function degree exceeds " +
                    std::to_string(kMaxTransferDegree));
  }
  const double lead = den_.leading();
  if (lead != 1.0) {
    num_ = (1.0 / lead) * num_;
    den_ = (1.0 / lead) * den_;
  }
  if (num_.is_zero()) den_ = Polynomial::constant(1.0);
}

TransferFunction TransferFunction::constant(double c) {
  return TransferFunction(Polynomial::constant(c), Polynomial::constant(1.0));
}

TransferFunction TransferFunction::shift() {
  return TransferFunction(Polynomial({0.0, 1.0}), Polynomial::constant(1.0));
}

TransferFunction TransferFunction::delay() {
  return TransferFunction(Polynomial::constant(1.0), Polynomial({0.0, 1.0}));
}

Complex TransferFunction::operator()(Complex z) const {
  const Complex d = den_(z);
  if (std::abs(d) <= 1e-13 * den_.magnitude_bound(z)) {
    throw Error(ErrorCode::kPoleEvaluation,
                "evaluation at a pole of the transfer function");
  }
  return num_(z) / d;
}

TransferFunction TransferFunction::reduced() const {
  if (num_.is_zero()) return TransferFunction();
  Polynomial num = num_;
  Polynomial den = den_;
  bool changed = true;
  while (changed && num.degree() > 0 && den.degree() > 0) {
    changed = false;
    const std::vector<Complex> rn = num.roots();
    const std::vector<Complex> rd = den.roots();
    struct Pair {
      double distance;
      Complex mid;
    };
    std::vector<Pair> pairs;
    for (const Complex& a : rn) {
      for (const Complex& b : rd) {
        const double dist = std::abs(a - b);
        if (dist <= 1e-4 * (1.0 + std::abs(b))) {
          pairs.push_back({dist, 0.5 * (cluster_mean(rn, a) + cluster_mean(rd, b))});
        }
      }
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const Pair& x, const Pair& y) { return x.distance < y.distance; });
    for (const Pair& pair : pairs) {
      const Polynomial factor = root_factor(pair.mid);
      if (factor.degree() > num.degree() || factor.degree() > den.degree()) {
        continue;
      }
      Polynomial qn, qd;
      if (divides(num, factor, &qn) && divides(den, factor, &qd)) {
        num = qn;
        den = qd;
        changed = true;
        break;
      }
    }
  }
  return TransferFunction(num, den);
}

TransferFunction TransferFunction::scaled_argument(double s) const {
  return TransferFunction(num_.scaled_argument(s), den_.scaled_argument(s));
}

bool TransferFunction::approx_equal(const TransferFunction& other,
                                    double tol) const {
  const TransferFunction a = reduced();
  const TransferFunction b = other.reduced();
  return a.num_.approx_equal(b.num_, tol) && a.den_.approx_equal(b.den_, tol);
}

TransferFunction TransferFunction::operator-() const {
  return TransferFunction(-num_, den_);
}

TransferFunction operator+(const TransferFunction& a,
                           const TransferFunction& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (same_coefficients(a.den_, b.den_)) {
    return TransferFunction(a.num_ + b.num_, a.den_);
  }
  return TransferFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

TransferFunction operator-(const TransferFunction& a,
                           const TransferFunction& b) {
  return a + (-b);
}

TransferFunction operator*(const TransferFunction& a,
                           const TransferFunction& b) {
  if (a.is_zero() || b.is_zero()) return TransferFunction();
  return TransferFunction(a.num_ * b.num_, a.den_ * b.den_);
}

TransferFunction operator/(const TransferFunction& a,
                           const TransferFunction& b) {
  if (b.is_zero()) {
    throw Error(ErrorCode::kInvalidArgument,
                "division by the zero transfer function");
  }
  return TransferFunction(a.num_ * b.den_, a.den_ * b.num_);
}

TransferFunction operator*(double s, const TransferFunction& g) {
  return TransferFunction(s * g.num_, g.den_);
}

TransferFunction operator+(double s, const TransferFunction& g) {
  return TransferFunction(s * g.den_ + g.num_, g.den_);
}

double feedthrough(const TransferFunction& tf) {
  if (!tf.is_proper()) {
    throw Error(ErrorCode::kImproper, "feedthrough of an improper function");
  }
  if (tf.is_strictly_proper()) return 0.0;
  return tf.num().leading() / tf.den().leading();
}

PolesZeros poles_zeros(const TransferFunction& tf) {
  PolesZeros out;
  out.poles = tf.den().roots();
  if (!tf.is_zero()) out.zeros = tf.num().roots();
  return out;
}

FeedbackLoop feedback(const TransferFunction& P, const TransferFunction& C) {
  const Polynomial nl = P.num() * C.num();
  const Polynomial dl = P.den() * C.den();
  const Polynomial closed = dl + nl;
  if (closed.is_zero()) {
    throw Error(ErrorCode::kSingularLoop, "1 + PC vanishes identically");
  }
  return {TransferFunction(nl, closed).reduced(),
          TransferFunction(dl, closed).reduced()};
}

double spectral_radius(const Polynomial& p) {
  double r = 0.0;
  for (const Complex& root : p.roots()) r = std::max(r, std::abs(root));
  return r;
}

bool is_rho_stable(const TransferFunction& tf, double radius) {
  if (!(radius > 0.0) || radius > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "radius must lie in (0, 1]");
  }
  for (const Complex& p : tf.den().roots()) {
    if (!(std::abs(p) < radius - kStabilityTolerance)) return false;
  }
  return true;
}

Polynomial closed_loop_charpoly(const TransferFunction& G, double lambda) {
  return (G.den() + lambda * G.num()).monic();
}

}  // namespace marginopt
