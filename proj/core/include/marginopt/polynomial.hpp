#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

namespace marginopt {

using Complex = std::complex<double>;

// Real polynomial stored with ascending-degree coefficients. Leading zeros are
// trimmed on construction; the zero polynomial is the single coefficient 0.
class Polynomial {
 public:
  Polynomial();
  Polynomial(std::initializer_list<double> ascending);
  explicit Polynomial(std::vector<double> ascending);

  static Polynomial constant(double c);
  static Polynomial monomial(int degree, double coefficient = 1.0);
  // Expands leading * prod (z - r_i). Complex roots must come in conjugate
  // pairs; imaginary residue of the expansion is dropped.
  static Polynomial from_roots(std::span<const Complex> roots,
                               double leading = 1.0);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double operator[](int i) const;
  double leading() const { return coeffs_.back(); }
  double max_abs_coeff() const;

  Complex operator()(Complex z) const;
  double operator()(double x) const;
  // sum |c_i| |z|^i, the natural scale for judging |p(z)| against round-off.
  double magnitude_bound(Complex z) const;

  Polynomial derivative() const;
  Polynomial monic() const;
  // q(z) = p(s z).
  Polynomial scaled_argument(double s) const;
  // z^n p(1/z); n must be >= degree().
  Polynomial reversed(int n) const;

  // Roots with multiplicity, from the eigenvalues of the companion matrix,
  // each polished by Newton steps that are kept only when they reduce |p|.
  std::vector<Complex> roots() const;

  Polynomial operator-() const;
  friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double s, const Polynomial& p);
  friend Polynomial operator*(const Polynomial& p, double s) { return s * p; }

  // Euclidean division: a = q b + r with deg r < deg b.
  static std::pair<Polynomial, Polynomial> divmod(const Polynomial& a,
                                                  const Polynomial& b);

  bool approx_equal(const Polynomial& other, double tol) const;

 private:
  void trim();

  std::vector<double> coeffs_;
};

// Relative threshold below which a leading coefficient is treated as
// cancellation residue and trimmed.
inline constexpr double kTrimTolerance = 1e-13;

}  // namespace marginopt
