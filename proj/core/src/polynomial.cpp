#include "marginopt/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "marginopt/error.hpp"

namespace marginopt {

Polynomial::Polynomial() : coeffs_{0.0} {}

Polynomial::Polynomial(std::initializer_list<double> ascending)
    : coeffs_(ascending) {
  trim();
}

Polynomial::Polynomial(std::vector<double> ascending)
    : coeffs_(std::move(ascending)) {
  trim();
}

Polynomial Polynomial::constant(double c) { return Polynomial({c}); }

Polynomial Polynomial::monomial(int degree, double coefficient) {
  if (degree < 0) {
    throw Error(ErrorCode::kInvalidArgument, "monomial: negative degree");
  }
  std::vector<double> c(static_cast<size_t>(degree) + 1, 0.0);
  c.back() = coefficient;
  return Polynomial(std::move(c));
}

Polynomial Polynomial::from_roots(std::span<const Complex> roots,
                                  double leading) {
  std::vector<Complex> c{Complex(leading, 0.0)};
  for (const Complex& r : roots) {
    std::vector<Complex> next(c.size() + 1, Complex(0.0, 0.0));
    for (size_t i = 0; i < c.size(); ++i) {
      next[i + 1] += c[i];
      next[i] -= r * c[i];
    }
    c = std::move(next);
  }
  std::vector<double> real(c.size());
  std::transform(c.begin(), c.end(), real.begin(),
                 [](const Complex& v) { return v.real(); });
  return Polynomial(std::move(real));
}

void Polynomial::trim() {
  if (coeffs_.empty()) {
    coeffs_.push_back(0.0);
    return;
  }
  for (double c : coeffs_) {
    if (!std::isfinite(c)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "polynomial coefficient is not finite");
    }
  }
  const double scale = max_abs_coeff();
  while (coeffs_.size() > 1 &&
         std::abs(coeffs_.back()) <= kTrimTolerance * scale) {
    coeffs_.pop_back();
  }
  if (coeffs_.size() == 1 && std::abs(coeffs_[0]) == 0.0) coeffs_[0] = 0.0;
}

double Polynomial::operator[](int i) const {
  if (i < 0 || i > degree()) return 0.0;
  return coeffs_[static_cast<size_t>(i)];
}

double Polynomial::max_abs_coeff() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

Complex Polynomial::operator()(Complex z) const {
  Complex acc(0.0, 0.0);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * z + *it;
  }
  return acc;
}

double Polynomial::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * x + *it;
  }
  return acc;
}

double Polynomial::magnitude_bound(Complex z) const {
  const double r = std::abs(z);
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * r + std::abs(*it);
  }
  return acc;
}

Polynomial Polynomial::derivative() const {
  if (degree() == 0) return Polynomial();
  std::vector<double> d(coeffs_.size() - 1);
  for (size_t i = 1; i < coeffs_.size(); ++i) {
    d[i - 1] = static_cast<double>(i) * coeffs_[i];
  }
  return Polynomial(std::move(d));
}

Polynomial Polynomial::monic() const {
  if (is_zero()) return *this;
  return (1.0 / leading()) * (*this);
}

Polynomial Polynomial::scaled_argument(double s) const {
  std::vector<double> c = coeffs_;
  double p = 1.0;
  for (double& v : c) {
    v *= p;
    p *= s;
  }
  return Polynomial(std::move(c));
}

Polynomial Polynomial::reversed(int n) const {
  if (n < degree()) {
    throw Error(ErrorCode::kInvalidArgument, "reversed: n below degree");
  }
  std::vector<double> c(static_cast<size_t>(n) + 1, 0.0);
  for (int i = 0; i <= degree(); ++i) c[static_cast<size_t>(n - i)] = (*this)[i];
  return Polynomial(std::move(c));
}

std::vector<Complex> Polynomial::roots() const {
  const int n = degree();
  if (n <= 0) return {};
  if (n == 1) return {Complex(-coeffs_[0] / coeffs_[1], 0.0)};

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  companion.block(1, 0, n - 1, n - 1).setIdentity();
  for (int i = 0; i < n; ++i) {
    companion(i, n - 1) = -coeffs_[static_cast<size_t>(i)] / leading();
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kFactorizationFailure,
                "companion eigenvalue solve failed");
  }

  const Polynomial dp = derivative();
  std::vector<Complex> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    Complex r = solver.eigenvalues()(i);
    double best = std::abs((*this)(r));
    for (int step = 0; step < 3 && best > 0.0; ++step) {
      const Complex d = dp(r);
      if (std::abs(d) == 0.0) break;
      const Complex candidate = r - (*this)(r) / d;
      const double value = std::abs((*this)(candidate));
      if (!(value < best)) break;
      r = candidate;
      best = value;
    }
    out.push_back(r);
  }
  return out;
}

Polynomial Polynomial::operator-() const { return -1.0 * (*this); }

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
  std::vector<double> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
  for (size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
  for (size_t i = 0; i < b.coeffs_.size(); ++i) c[i] += b.coeffs_[i];
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  return a + (-b);
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  std::vector<double> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (size_t i = 0; i < a.coeffs_.size(); ++i) {
    for (size_t j = 0; j < b.coeffs_.size(); ++j) {
      c[i + j] += a.coeffs_[i] * b.coeffs_[j];
    }
  }
  return Polynomial(std::move(c));
}

Polynomial operator*(double s, const Polynomial& p) {
  std::vector<double> c = p.coeffs_;
  for (double& v : c) v *= s;
  return Polynomial(std::move(c));
}

std::pair<Polynomial, Polynomial> Polynomial::divmod(const Polynomial& a,
                                                     const Polynomial& b) {
  if (b.is_zero()) {
    throw Error(ErrorCode::kInvalidArgument, "division by zero polynomial");
  }
  if (a.degree() < b.degree()) return {Polynomial(), a};
  std::vector<double> rem = a.coeffs_;
  std::vector<double> quot(static_cast<size_t>(a.degree() - b.degree()) + 1,
                           0.0);
  const int db = b.degree();
  for (int k = a.degree() - db; k >= 0; --k) {
    const double q = rem[static_cast<size_t>(k + db)] / b.leading();
    quot[static_cast<size_t>(k)] = q;
    for (int j = 0; j <= db; ++j) {
      rem[static_cast<size_t>(k + j)] -= q * b.coeffs_[static_cast<size_t>(j)];
    }
    rem[static_cast<size_t>(k + db)] = 0.0;
  }
  rem.resize(static_cast<size_t>(std::max(db, 1)));
  return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
}

bool Polynomial::approx_equal(const Polynomial& other, double tol) const {
  const int n = std::max(degree(), other.degree());
  for (int i = 0; i <= n; ++i) {
    if (std::abs((*this)[i] - other[i]) > tol) return false;
  }
  return true;
}

}  // namespace marginopt
