#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "marginopt/problems.hpp"
#include "marginopt/synthesis.hpp"

namespace marginopt {

enum class StopReason { kTolerance, kMaxIter, kDivergence };
std::string to_string(StopReason r);

struct StopCriteria {
  double tol = 1e-10;  // on |x[t] - x*|
  long long max_iter = 100000;
  bool keep_iterates = false;  // honoured for d <= 64
};

struct Trace {
  std::vector<double> err_norm;       // |x[t] - x*|, t = 0, 1, ...
  std::vector<double> residual_norm;  // empty unless the runner records it
  std::vector<long long> grad_evals;  // cumulative
  std::vector<Eigen::VectorXd> iterates;
  long long terminated_at = 0;
  StopReason stop_reason = StopReason::kMaxIter;

  size_t size() const { return err_norm.size(); }
};

// Simulates the controllable realization of a strictly proper G in feedback
// with u = -grad f(x). The state starts at the accumulator equilibrium that
// outputs x0, i.e. a constant prehistory with zero past inputs. Throws
// NotStrictlyCausal for biproper G and Divergence past 1e12 |e[0]|.
Trace run_lti(const AlgorithmSpec& spec, const Objective& problem,
              const Eigen::VectorXd& x0, const StopCriteria& stop);

// Causal implicit heavy-ball on a quadratic, x[-1] = x0.
Trace run_implicit_hb(const RateBudget& budget, double rho,
                      const QuadraticProblem& problem,
                      const Eigen::VectorXd& x0, const StopCriteria& stop);

enum class ProxMode { kInnerGradient, kClosedForm };

// x+ = prox_{alpha f}(x - beta grad f(x)) with (alpha, beta) from
// implicit_gd. kClosedForm requires a QuadraticProblem. Inner gradient calls
// are counted.
Trace run_implicit_prox(const RateBudget& budget, double rho,
                        const Objective& problem, const Eigen::VectorXd& x0,
                        const StopCriteria& stop,
                        ProxMode mode = ProxMode::kInnerGradient);

// Same outer loop with the prox parameters given directly.
Trace run_implicit_prox_coefficients(double alpha, double beta,
                                     const Objective& problem,
                                     const Eigen::VectorXd& x0,
                                     const StopCriteria& stop,
                                     ProxMode mode = ProxMode::kInnerGradient);

// x+ = soft_threshold(x - eta grad h(x), lambda eta), eta = 2/(mu+ell);
// records residual_norm at every step.
Trace run_prox_grad(const RateBudget& budget, const CompositeProblem& problem,
                    const Eigen::VectorXd& x0, const StopCriteria& stop);

struct CsvHeader {
  std::string config_hash;
  std::uint64_t seed = 0;
  int subsample = 1;  // every k-th row written (the last row always)
};
// "# config_hash=... seed=... subsample=k" then t,err_norm,residual_norm,
// grad_evals. Missing residuals print as empty fields.
void write_trace_csv(std::ostream& out, const Trace& trace,
                     const CsvHeader& header);

}  // namespace marginopt
