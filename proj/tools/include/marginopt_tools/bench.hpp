#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "marginopt/runtime.hpp"

namespace marginopt::tools {

// FNV-1a 64 over the compact dump of j (object keys sorted), as 16 hex digits.
std::string config_hash(const nlohmann::json& j);

// {0} plus 19 log-spaced points in [0.01, 10].
std::vector<double> default_fig4_alphas();

struct Fig4Config {
  int d = 100;
  double mu = 0.01;
  double ell = 100.0;
  double tol = 1e-10;
  long long max_iter = 2000000;
  std::vector<double> alphas = default_fig4_alphas();
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

struct Fig4Point {
  double alpha = 0.0;
  double rho = 0.0;      // rho_circle(alpha)
  double kappa_sub = 0.0;
  double rho_sub = 0.0;  // (kappa_sub - 1)/(kappa_sub + 1)
  long long grad_evals = 0;
  long long outer_iterations = 0;
  double theory_main = 0.0;  // c / ln rho
  double theory_sub = 0.0;   // c / ln rho_sub
  std::string status;        // tolerance, max_iter or an error code
};

struct Fig4Report {
  Fig4Config config;
  std::string hash;
  double e0 = 0.0;
  std::vector<Fig4Point> points;
};

Fig4Report bench_fig4(const Fig4Config& config);
void write_fig4_csv(std::ostream& out, const Fig4Report& report);
nlohmann::json fig4_summary(const Fig4Report& report);

struct Fig5Config {
  int d = 1000;
  double mu = 0.1;
  double ell = 100.0;
  double lambda = 1.0;
  double tol = 1e-10;
  long long max_iter = 20000;
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
};

struct Fig5Report {
  Fig5Config config;
  std::string hash;
  double rho_gd = 0.0;
  Trace trace;
  std::vector<double> envelope;  // |e[0]| rho_gd^t
  double max_slack = 0.0;        // max |e[t]| / envelope[t]
  long long violations = 0;      // steps with slack > 1.05
  double empirical_rate = 0.0;
};

Fig5Report bench_fig5(const Fig5Config& config);
void write_fig5_envelope_csv(std::ostream& out, const Fig5Report& report);
nlohmann::json fig5_summary(const Fig5Report& report);

}  // namespace marginopt::tools
