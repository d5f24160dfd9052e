#include "marginopt/runtime.hpp"

#include <cmath>
#include <cstdio>

#include "marginopt/error.hpp"

namespace marginopt {
namespace {

constexpr double kDivergenceFactor = 1e12;

// Shared bookkeeping: record a step, decide whether to stop.
class Recorder {
 public:
  Recorder(Trace& trace, const Eigen::VectorXd& x_star, const StopCriteria& stop)
      : trace_(trace), x_star_(x_star), stop_(stop),
        keep_(stop.keep_iterates && x_star.size() <= 64) {}

  // Returns true when the run should stop after this record.
  bool record(long long t, const Eigen::VectorXd& x, long long grads,
              std::optional<double> residual = std::nullopt) {
    const double e = (x - x_star_).norm();
    if (!std::isfinite(e)) {
      throw Error(ErrorCode::kDivergence, "iterate is not finite");
    }
    if (t == 0) e0_ = e;
    if (e > kDivergenceFactor * std::max(e0_, 1e-300) && e0_ > 0.0) {
      trace_.stop_reason = StopReason::kDivergence;
      throw Error(ErrorCode::kDivergence,
                  "error exceeded 1e12 times its initial value at step " +
                      std::to_string(t));
    }
    trace_.err_norm.push_back(e);
    trace_.grad_evals.push_back(grads);
    if (residual) trace_.residual_norm.push_back(*residual);
    if (keep_) trace_.iterates.push_back(x);
    trace_.terminated_at = t;
    if (e <= stop_.tol) {
      trace_.stop_reason = StopReason::kTolerance;
      return true;
    }
    if (t >= stop_.max_iter) {
      trace_.stop_reason = StopReason::kMaxIter;
      return true;
    }
    return false;
  }

 private:
  Trace& trace_;
  const Eigen::VectorXd& x_star_;
  const StopCriteria& stop_;
  bool keep_;
  double e0_ = 0.0;
};

void check_start(const Eigen::VectorXd& x0, int d) {
  if (x0.size() != d) {
    throw Error(ErrorCode::kInvalidArgument, "starting point has the wrong dimension");
  }
  if (!x0.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "starting point is not finite");
  }
}

}  // namespace

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::kTolerance: return "tolerance";
    case StopReason::kMaxIter: return "max_iter";
    case StopReason::kDivergence: return "divergence";
  }
  return "unknown";
}

Trace run_lti(const AlgorithmSpec& spec, const Objective& problem,
              const Eigen::VectorXd& x0, const StopCriteria& stop) {
  check_start(x0, problem.dim());
  const TransferFunction& G = spec.scalar_G();
  if (!G.is_strictly_proper()) {
    throw Error(ErrorCode::kNotStrictlyCausal,
                "direct simulation needs a strictly proper algorithm");
  }
  const StateSpace& ss = spec.realization;
  const int n = ss.states();
  if (n == 0 || std::abs(G.den()(1.0)) > 1e-9 * G.den().magnitude_bound(1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "algorithm has no accumulator");
  }
  const double gain = ss.C.sum();
  if (std::abs(gain) < 1e-14) {
    throw Error(ErrorCode::kInvalidArgument, "accumulator mode is unobservable");
  }
  Eigen::MatrixXd S = Eigen::VectorXd::Ones(n) * x0.transpose() / gain;

  GradientCounter grad(problem);
  Trace trace;
  Recorder rec(trace, problem.x_star(), stop);
  for (long long t = 0;; ++t) {
    const Eigen::VectorXd x = (ss.C * S).transpose();
    if (rec.record(t, x, grad.count())) break;
    const Eigen::RowVectorXd u = -grad(x).transpose();
    S = ss.A * S + ss.B * u;
  }
  return trace;
}

Trace run_implicit_hb(const RateBudget& budget, double rho,
                      const QuadraticProblem& problem,
                      const Eigen::VectorXd& x0, const StopCriteria& stop) {
  check_start(x0, problem.dim());
  const AlgorithmSpec spec = implicit_heavy_ball(budget, rho);
  const IterationForm& form = *spec.iteration;
  const double momentum = form.coefficient("momentum");
  double gain, delta;
  if (spec.name == "implicit_heavy_ball") {
    gain = form.coefficient("gain");
    delta = form.coefficient("regularizer");
  } else {
    gain = form.coefficient("step");
    delta = 0.0;
  }
  const int d = problem.dim();
  Eigen::LLT<Eigen::MatrixXd> llt;
  if (delta > 0.0) {
    llt.compute(Eigen::MatrixXd::Identity(d, d) + delta * problem.Q());
    if (llt.info() != Eigen::Success) {
      throw Error(ErrorCode::kFactorizationFailure, "I + delta Q factorization failed");
    }
  }
  GradientCounter grad(problem);
  Trace trace;
  Recorder rec(trace, problem.x_star(), stop);
  Eigen::VectorXd prev = x0;
  Eigen::VectorXd x = x0;
  for (long long t = 0;; ++t) {
    if (rec.record(t, x, grad.count())) break;
    Eigen::VectorXd g = grad(x);
    if (delta > 0.0) g = llt.solve(g);
    Eigen::VectorXd next = x + momentum * (x - prev) - gain * g;
    prev = std::move(x);
    x = std::move(next);
  }
  return trace;
}

Trace run_implicit_prox_coefficients(double alpha, double beta,
                                     const Objective& problem,
                                     const Eigen::VectorXd& x0,
                                     const StopCriteria& stop, ProxMode mode) {
  check_start(x0, problem.dim());
  if (!(alpha >= 0.0) || !(beta > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "need alpha >= 0 and beta > 0");
  }
  std::optional<QuadraticProx> closed;
  if (mode == ProxMode::kClosedForm) {
    const auto* quad = dynamic_cast<const QuadraticProblem*>(&problem);
    if (quad == nullptr) {
      throw Error(ErrorCode::kInvalidArgument, "closed-form prox needs a quadratic");
    }
    if (alpha > 0.0) closed.emplace(*quad, alpha);
  }
  GradientCounter grad(problem);
  Trace trace;
  Recorder rec(trace, problem.x_star(), stop);
  Eigen::VectorXd x = x0;
  for (long long t = 0;; ++t) {
    if (rec.record(t, x, grad.count())) break;
    const Eigen::VectorXd v = x - beta * grad(x);
    if (mode == ProxMode::kClosedForm) {
      x = closed ? (*closed)(v) : v;
    } else {
      x = inner_prox(grad, alpha, v);
    }
  }
  return trace;
}

Trace run_implicit_prox(const RateBudget& budget, double rho,
                        const Objective& problem, const Eigen::VectorXd& x0,
                        const StopCriteria& stop, ProxMode mode) {
  const AlgorithmSpec spec = implicit_gd(budget, rho);
  return run_implicit_prox_coefficients(spec.iteration->coefficient("alpha"),
                                        spec.iteration->coefficient("beta"),
                                        problem, x0, stop, mode);
}

Trace run_prox_grad(const RateBudget& budget, const CompositeProblem& problem,
                    const Eigen::VectorXd& x0, const StopCriteria& stop) {
  check_start(x0, problem.dim());
  const double eta = 2.0 / (budget.mu() + budget.ell());
  const double threshold = problem.lambda() * eta;
  GradientCounter grad(problem.h());
  Trace trace;
  Recorder rec(trace, problem.x_star(), stop);
  Eigen::VectorXd x = x0;
  for (long long t = 0;; ++t) {
    const Eigen::VectorXd g = grad(x);
    if (rec.record(t, x, grad.count(), residual_norm(problem, x, g))) break;
    x = soft_threshold(x - eta * g, threshold);
  }
  return trace;
}

void write_trace_csv(std::ostream& out, const Trace& trace,
                     const CsvHeader& header) {
  const int k = std::max(1, header.subsample);
  out << "# config_hash=" << header.config_hash << " seed=" << header.seed
      << " subsample=" << k << "\n";
  out << "t,err_norm,residual_norm,grad_evals\n";
  char buf[128];
  const size_t n = trace.size();
  for (size_t t = 0; t < n; ++t) {
    if (t % static_cast<size_t>(k) != 0 && t + 1 != n) continue;
    if (t < trace.residual_norm.size()) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%lld\n", t,
                    trace.err_norm[t], trace.residual_norm[t], trace.grad_evals[t]);
    } else {
      std::snprintf(buf, sizeof buf, "%zu,%.17g,,%lld\n", t, trace.err_norm[t],
                    trace.grad_evals[t]);
    }
    out << buf;
  }
}

}  // namespace marginopt
