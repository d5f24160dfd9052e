#include "marginopt_tools/bench.hpp"

#include <cmath>
#include <cstdio>

#include "marginopt/error.hpp"
#include "marginopt/problems.hpp"
#include "marginopt/rates.hpp"
#include "marginopt/synthesis.hpp"

namespace marginopt::tools {

std::string config_hash(const nlohmann::json& j) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<double> default_fig4_alphas() {
  std::vector<double> a{0.0};
  for (int i = 0; i < 19; ++i) a.push_back(std::pow(10.0, -2.0 + 3.0 * i / 18.0));
  return a;
}

nlohmann::json Fig4Config::to_json() const {
  return {{"bench", "fig4"}, {"d", d},       {"mu", mu},
          {"ell", ell},      {"tol", tol},   {"max_iter", max_iter},
          {"alphas", alphas}, {"seed", seed}, {"x0", "zero"}};
}

Fig4Report bench_fig4(const Fig4Config& config) {
  const RateBudget budget = RateBudget::finite(config.mu, config.ell);
  const PiecewiseQuadraticProblem h =
      random_piecewise_quadratic(config.d, budget, config.seed);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(config.d);

  Fig4Report report;
  report.config = config;
  report.hash = config_hash(config.to_json());
  report.e0 = (x0 - h.x_star()).norm();
  const double c = std::log(config.tol / report.e0);

  StopCriteria stop;
  stop.tol = config.tol;
  stop.max_iter = config.max_iter;
  for (double alpha : config.alphas) {
    Fig4Point pt;
    pt.alpha = alpha;
    pt.rho = rho_circle(alpha, budget);
    pt.kappa_sub = sub_condition(alpha, budget);
    pt.rho_sub = (pt.kappa_sub - 1.0) / (pt.kappa_sub + 1.0);
    pt.theory_main = c / std::log(pt.rho);
    pt.theory_sub = pt.rho_sub > 0.0 ? c / std::log(pt.rho_sub) : 0.0;
    try {
      const Trace t = run_implicit_prox(budget, pt.rho, h, x0, stop);
      pt.grad_evals = t.grad_evals.back();
      pt.outer_iterations = t.terminated_at;
      pt.status = to_string(t.stop_reason);
    } catch (const Error& e) {
      // per-point failures stay in the table
      pt.status = std::string(to_string(e.code()));
    }
    report.points.push_back(pt);
  }
  return report;
}

void write_fig4_csv(std::ostream& out, const Fig4Report& report) {
  out << "# config_hash=" << report.hash << " seed=" << report.config.seed
      << " subsample=1\n";
  out << "alpha,rho,kappa_sub,rho_sub,grad_evals,outer_iterations,theory_main,"
         "theory_sub,status\n";
  char buf[256];
  for (const Fig4Point& p : report.points) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%lld,%lld,%.17g,%.17g,",
                  p.alpha, p.rho, p.kappa_sub, p.rho_sub, p.grad_evals,
                  p.outer_iterations, p.theory_main, p.theory_sub);
    out << buf << p.status << "\n";
  }
}

nlohmann::json fig4_summary(const Fig4Report& report) {
  nlohmann::json pts = nlohmann::json::array();
  for (const Fig4Point& p : report.points) {
    pts.push_back({{"alpha", p.alpha},
                   {"rho", p.rho},
                   {"kappa_sub", p.kappa_sub},
                   {"grad_evals", p.grad_evals},
                   {"outer_iterations", p.outer_iterations},
                   {"status", p.status}});
  }
  return {{"bench_config", report.config.to_json()},
          {"bench_config_hash", report.hash},
          {"seed", report.config.seed},
          {"e0", report.e0},
          {"points", pts}};
}

nlohmann::json Fig5Config::to_json() const {
  return {{"bench", "fig5"}, {"d", d},           {"mu", mu},
          {"ell", ell},      {"lambda", lambda}, {"tol", tol},
          {"max_iter", max_iter}, {"seed", seed}, {"x0", "zero"}};
}

Fig5Report bench_fig5(const Fig5Config& config) {
  const RateBudget budget = RateBudget::finite(config.mu, config.ell);
  const CompositeProblem problem =
      random_composite(config.d, budget, config.lambda, config.seed);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(config.d);

  Fig5Report report;
  report.config = config;
  report.hash = config_hash(config.to_json());
  report.rho_gd = rho_gd(budget);
  StopCriteria stop;
  stop.tol = config.tol;
  stop.max_iter = config.max_iter;
  report.trace = run_prox_grad(budget, problem, x0, stop);

  const double e0 = report.trace.err_norm.front();
  double env = e0;
  for (size_t t = 0; t < report.trace.size(); ++t) {
    report.envelope.push_back(env);
    const double slack = env > 0.0 ? report.trace.err_norm[t] / env : 0.0;
    report.max_slack = std::max(report.max_slack, slack);
    if (slack > 1.05) ++report.violations;
    env *= report.rho_gd;
  }
  try {
    report.empirical_rate = empirical_rate(report.trace).rho_hat;
  } catch (const Error&) {
    report.empirical_rate = std::nan("");
  }
  return report;
}

void write_fig5_envelope_csv(std::ostream& out, const Fig5Report& report) {
  out << "# config_hash=" << report.hash << " seed=" << report.config.seed
      << " subsample=1\n";
  out << "t,envelope,slack\n";
  char buf[128];
  for (size_t t = 0; t < report.envelope.size(); ++t) {
    const double env = report.envelope[t];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", t, env,
                  env > 0.0 ? report.trace.err_norm[t] / env : 0.0);
    out << buf;
  }
}

nlohmann::json fig5_summary(const Fig5Report& report) {
  const Trace& t = report.trace;
  return {{"bench_config", report.config.to_json()},
          {"bench_config_hash", report.hash},
          {"seed", report.config.seed},
          {"rho_gd", report.rho_gd},
          {"iterations", t.terminated_at},
          {"stop_reason", to_string(t.stop_reason)},
          {"final_error", t.err_norm.back()},
          {"final_residual", t.residual_norm.empty() ? 0.0 : t.residual_norm.back()},
          {"max_envelope_slack", report.max_slack},
          {"envelope_violations", report.violations},
          {"empirical_rate", report.empirical_rate}};
}

}  // namespace marginopt::tools
