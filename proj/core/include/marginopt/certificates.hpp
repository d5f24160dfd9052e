#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "marginopt/synthesis.hpp"

namespace marginopt {

struct SPRConfig {
  int grid_points = 4096;  // samples of the circle |z| = gamma
  double epsilon = 1e-9;   // floor on the Hermitian part

  void validate() const;
};

// Pointwise bound k1 <= <phi(x), x>/|x|^2 <= k2; k2 may be +infinity.
struct SectorBound {
  double k1;
  double k2;

  void validate() const;
};

// Psi = (1 + ell G)/(1 + mu G) and its inverse G = (Psi - 1)/(ell - mu Psi).
// Throws SingularTransform; the mu-only budget is rejected.
TransferFunction loop_transform(const TransferFunction& G,
                                const RateBudget& budget);
TransferFunction inverse_loop_transform(const TransferFunction& Psi,
                                        const RateBudget& budget);

// Psi = (E + L G)(I + M G)^-1 with E = diag(1,0), L = diag(ell,1),
// M = diag(mu,0); inverse G = (L - Psi M)^-1 (Psi - E).
TransferMatrix loop_transform_split(const TransferMatrix& G,
                                    const RateBudget& budget);
TransferMatrix inverse_loop_transform_split(const TransferMatrix& Psi,
                                            const RateBudget& budget);

// The unique Psi for the implicit gradient method at rate rho:
// kappa (1-rho)(z+rho) / ((1+rho)(z-rho)).
TransferFunction circle_psi(const RateBudget& budget, double rho);

// Poles strictly inside |z| < gamma and Hermitian part above the floor on
// the sampled circle |z| = gamma.
bool spr_check(const TransferFunction& Psi, double gamma,
               const SPRConfig& config = {});
bool spr_check(const TransferMatrix& Psi, double gamma,
               const SPRConfig& config = {});

// Bisection (to 1e-4) for the smallest rho such that SPR holds at 32
// log-spaced gamma in (rho, 1). Throws Uncertifiable.
double rate_certificate(const TransferFunction& G, const RateBudget& budget,
                        const SPRConfig& config = {});

struct ScaledSPRResult {
  bool found;
  double w;
};
// First w in the grid for which diag(w,1) Psi diag(1/w,1) passes spr_check.
ScaledSPRResult scaled_spr_search(const TransferMatrix& Psi, double gamma,
                                  const std::vector<double>& w_grid,
                                  const SPRConfig& config = {});

struct CaratheodoryPick {
  Eigen::Matrix4d Lambda;
  Eigen::Vector4d eigenvalues;  // ascending
  bool feasible;
};
CaratheodoryPick caratheodory_pick(const Eigen::Matrix2d& P1,
                                   const Eigen::Matrix2d& Pinf, double gamma);

// P1 and Pinf for the splitting problem: diag(w,1) Psi(.) diag(1/w,1) at 1
// and at infinity, with Psi(1), Psi(inf) fixed by the interpolation
// conditions for step eta1 and eta2.
struct SplittingPickData {
  Eigen::Matrix2d P1;
  Eigen::Matrix2d Pinf;
};
SplittingPickData splitting_pick_data(const RateBudget& budget, double eta1,
                                      double eta2, double w);

using VectorMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Sampled check of <phi(x) - k1 x, phi(x) - k2 x> <= tol at Gaussian points
// spread over radii 1e-3 .. 1e2.
bool verify_sector(const VectorMap& phi, const SectorBound& bound, int samples,
                   int dim, std::uint64_t seed);
// Dense 1-D grid on [-radius, radius], zero excluded.
bool verify_sector_grid(const std::function<double(double)>& phi,
                        const SectorBound& bound, int points, double radius);

}  // namespace marginopt
