#pragma once

#include <vector>

#include "marginopt/polynomial.hpp"

namespace marginopt {

// Largest numerator/denominator degree accepted by TransferFunction.
inline constexpr int kMaxTransferDegree = 32;
// Relative residual (against coefficient magnitude) under which a shared root
// of numerator and denominator is cancelled by reduced().
inline constexpr double kCancellationTolerance = 1e-9;
// Margin used by modulus comparisons of poles (stability, rho-stability).
inline constexpr double kStabilityTolerance = 1e-9;

// Real-coefficient rational function num(z)/den(z) with a monic denominator.
class TransferFunction {
 public:
  TransferFunction();  // the zero function
  TransferFunction(Polynomial num, Polynomial den);

  static TransferFunction constant(double c);
  // The forward shift z.
  static TransferFunction shift();
  // The backward shift z^-1.
  static TransferFunction delay();

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_proper() const { return num_.degree() <= den_.degree(); }
  bool is_strictly_proper() const {
    return is_zero() || num_.degree() < den_.degree();
  }
  // Relative degree deg(den) - deg(num).
  int relative_degree() const { return den_.degree() - num_.degree(); }

  // Throws PoleEvaluation when |den(z)| is at round-off level.
  Complex operator()(Complex z) const;

  // Cancels numerator/denominator roots that agree to kCancellationTolerance.
  TransferFunction reduced() const;

  // G(s z).
  TransferFunction scaled_argument(double s) const;

  // Coefficient-wise comparison after reduction (both sides monic den).
  bool approx_equal(const TransferFunction& other, double tol = 1e-9) const;

  TransferFunction operator-() const;
  friend TransferFunction operator+(const TransferFunction& a,
                                    const TransferFunction& b);
  friend TransferFunction operator-(const TransferFunction& a,
                                    const TransferFunction& b);
  friend TransferFunction operator*(const TransferFunction& a,
                                    const TransferFunction& b);
  friend TransferFunction operator/(const TransferFunction& a,
                                    const TransferFunction& b);
  friend TransferFunction operator*(double s, const TransferFunction& g);
  friend TransferFunction operator+(double s, const TransferFunction& g);

 private:
  Polynomial num_;
  Polynomial den_;
};

// G(infinity). Zero when strictly proper; throws Improper when deg num > deg
// den.
double feedthrough(const TransferFunction& tf);

struct PolesZeros {
  std::vector<Complex> poles;
  std::vector<Complex> zeros;
};
PolesZeros poles_zeros(const TransferFunction& tf);

struct FeedbackLoop {
  TransferFunction T;  // complementary sensitivity PC/(1+PC)
  TransferFunction S;  // sensitivity 1/(1+PC)
};
// Negative unity feedback of the loop gain P*C. Throws SingularLoop when
// 1 + PC vanishes identically.
FeedbackLoop feedback(const TransferFunction& P, const TransferFunction& C);

// True iff every pole lies strictly inside |z| < radius (with tolerance).
bool is_rho_stable(const TransferFunction& tf, double radius);

// den(G) + lambda num(G), normalized monic: the closed-loop characteristic
// polynomial of G in negative feedback with the static gain lambda.
Polynomial closed_loop_charpoly(const TransferFunction& G, double lambda);

// Largest root modulus; 0 for constants.
double spectral_radius(const Polynomial& p);

}  // namespace marginopt
