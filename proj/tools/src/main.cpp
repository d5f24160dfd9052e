#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "marginopt/certificates.hpp"
#include "marginopt/error.hpp"
#include "marginopt/gain_margin.hpp"
#include "marginopt/json_io.hpp"
#include "marginopt/lifting.hpp"
#include "marginopt/problems.hpp"
#include "marginopt/rates.hpp"
#include "marginopt/runtime.hpp"
#include "marginopt/synthesis.hpp"
#include "marginopt_tools/bench.hpp"

using nlohmann::json;
namespace fs = std::filesystem;
using namespace marginopt;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raw option strings per subcommand, keyed by parameter name.
struct Options {
  std::map<std::string, std::string> raw;
  std::vector<std::string> names;
};

void add(CLI::App* sub, Options& o, const std::string& name,
         const std::string& help) {
  std::string key = name;
  for (char& c : key) {
    if (c == '-') c = '_';
  }
  o.names.push_back(key);
  sub->add_option("--" + name, o.raw[key], help);
}

json parse_value(const std::string& s) {
  try {
    return json::parse(s);
  } catch (const json::parse_error&) {
    return s;
  }
}

// Config-file parameters overlaid by explicitly given flags.
json resolve(const CLI::App* sub, const Options& o, const json& file_params) {
  json p = json::object();
  for (const auto& [k, v] : file_params.items()) {
    if (std::find(o.names.begin(), o.names.end(), k) == o.names.end()) {
      throw UsageError("unknown parameter '" + k + "' for " + sub->get_name());
    }
    p[k] = v;
  }
  for (const auto& key : o.names) {
    std::string flag = key;
    for (char& c : flag) {
      if (c == '_') c = '-';
    }
    if (sub->count("--" + flag) > 0) p[key] = parse_value(o.raw.at(key));
  }
  return p;
}

double num(const json& p, const std::string& k) {
  if (!p.contains(k)) throw UsageError("missing parameter --" + k);
  if (!p[k].is_number()) throw UsageError("parameter --" + k + " must be a number");
  return p[k].get<double>();
}
double num(const json& p, const std::string& k, double fallback) {
  return p.contains(k) ? num(p, k) : fallback;
}
std::string str(const json& p, const std::string& k, const std::string& fallback) {
  if (!p.contains(k)) return fallback;
  return p[k].is_string() ? p[k].get<std::string>() : p[k].dump();
}

RateBudget budget_of(const json& p) {
  const double mu = num(p, "mu");
  if (!p.contains("ell")) return RateBudget::mu_only(mu);
  return RateBudget::finite(mu, num(p, "ell"));
}

AlgorithmSpec build_spec(const json& p) {
  const std::string method = str(p, "method", "");
  const RateBudget b = budget_of(p);
  if (method == "gd") return gradient_descent(b, num(p, "alpha"));
  if (method == "optimal-gd") return optimal_gradient_descent(b);
  if (method == "heavy-ball") return heavy_ball(b);
  if (method == "implicit-hb") return implicit_heavy_ball(b, num(p, "rho"));
  if (method == "implicit-gd") return implicit_gd(b, num(p, "rho"));
  if (method == "splitting") return splitting_synthesis(b);
  throw UsageError("unknown method '" + method +
                   "' (gd, optimal-gd, heavy-ball, implicit-hb, implicit-gd, splitting)");
}

json spec_json(const AlgorithmSpec& s) {
  json j;
  j["algorithm"] = s.name;
  j["rate"] = s.certified_rate;
  j["rate_class"] = s.rate_class;
  j["flags"] = s.flags;
  j["G"] = s.is_scalar() ? to_json(s.scalar_G()) : to_json(s.matrix_G());
  j["feedthrough"] = to_json(s.feedthrough);
  j["realization"] = to_json(s.realization);
  if (s.iteration) {
    j["update"] = s.iteration->update;
    json coeffs = json::object();
    for (const auto& [k, v] : s.iteration->coefficients) {
      coeffs[k] = v;
      j[k] = v;
    }
    j["coefficients"] = coeffs;
  }
  return j;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  const json j = parse_value(s);
  if (j.is_array()) return j.get<std::vector<double>>();
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write " + path.string());
  f << body;
}

struct Context {
  std::uint64_t seed = 0;
  fs::path out = ".";
  std::string hash;
};

json cmd_synth(const json& p, const Context&) { return spec_json(build_spec(p)); }

json cmd_margin(const json& p, const Context&) {
  const Complex pole = complex_from_json(p.contains("pole") ? p["pole"] : json());
  // a bare ratio r means the interval [1/sqrt(r), sqrt(r)]
  double k1, k2;
  if (p.contains("k1") || p.contains("k2")) {
    k1 = num(p, "k1");
    k2 = num(p, "k2");
  } else {
    const double r = num(p, "ratio");
    if (!(r > 1.0)) throw UsageError("ratio must exceed 1");
    k1 = 1.0 / std::sqrt(r);
    k2 = std::sqrt(r);
  }
  MarginSpec spec{pole, k1, k2, true};
  spec.validate();
  json j;
  j["pole"] = to_json(pole);
  j["k1"] = k1;
  j["k2"] = k2;
  j["g"] = g_of(k1, k2);
  j["feasible"] = margin_feasible(spec);
  j["optimal_ratio"] = optimal_margin(pole);
  if (j["feasible"].get<bool>() && pole.imag() == 0.0) {
    const MarginDesign d = design_margin_controller(pole.real(), k1, k2);
    j["P0"] = to_json(d.P0);
    j["T"] = to_json(d.T);
    j["C"] = to_json(d.C);
    j["verified"] = margin_verify(d.P0, d.C, k1, k2,
                                  static_cast<int>(num(p, "grid", 25)));
  }
  return j;
}

json lifted_json(const LiftedSystem& sys) {
  const AccumulatorCheck acc = check_accumulator_direction(sys);
  return {{"period", sys.period},
          {"G_tilde", to_json(sys.G_tilde)},
          {"causal", check_causal_structure(sys)},
          {"accumulator_ok", acc.ok},
          {"accumulator_residue", to_json(Eigen::MatrixXd(acc.residue))}};
}

json cmd_lift(const json& p, const Context&) {
  if (p.contains("steps")) {
    return lifted_json(lift_periodic_gd({parse_list(str(p, "steps", ""))}));
  }
  if (p.contains("G")) {
    const json g = p["G"].is_string() ? json::parse(p["G"].get<std::string>()) : p["G"];
    return lifted_json(lift_lti(transfer_function_from_json(g),
                                static_cast<int>(num(p, "period"))));
  }
  throw UsageError("lift needs --steps or --G with --period");
}

json cmd_certify(const json& p, const Context&) {
  const std::string method = str(p, "method", "");
  json j;
  if (method == "sector1d") {
    const Sector1DProblem f(num(p, "a"), num(p, "b"));
    const SectorBound bound{num(p, "k1"), num(p, "k2")};
    const int points = static_cast<int>(num(p, "points", 100000));
    j["sector_ok"] = verify_sector_grid([&](double e) { return f.delta(e); }, bound,
                                        points, num(p, "radius", 3.0));
    return j;
  }
  const RateBudget b = budget_of(p);
  const AlgorithmSpec spec = build_spec(p);
  j["algorithm"] = spec.name;
  j["claimed_rate"] = spec.certified_rate;
  if (!spec.is_scalar()) {
    const SplittingData data = splitting_data(b);
    const double gamma = num(p, "gamma", rho_gd(b) + 0.01);
    const SplittingPickData pick =
        splitting_pick_data(b, data.eta1, data.eta2, std::sqrt(data.w_squared));
    const CaratheodoryPick res = caratheodory_pick(pick.P1, pick.Pinf, gamma);
    j["gamma"] = gamma;
    j["pick_feasible"] = res.feasible;
    j["pick_eigenvalues"] = std::vector<double>(res.eigenvalues.data(),
                                                res.eigenvalues.data() + 4);
    return j;
  }
  const TransferFunction& G = spec.scalar_G();
  if (b.has_ell()) j["worst_case_rate"] = worst_case_rate(G, b);
  if (spec.rate_class == "sector" && b.has_ell() && spec.delta() == 0.0) {
    j["circle_certificate"] = rate_certificate(G, b);
  }
  return j;
}

json cmd_run(const json& p, const Context& ctx) {
  const std::string method = str(p, "method", "");
  const std::string problem = str(p, "problem", "quadratic");
  const RateBudget b = budget_of(p);
  const int d = static_cast<int>(num(p, "d", 20));
  StopCriteria stop;
  stop.tol = num(p, "tol", 1e-10);
  stop.max_iter = static_cast<long long>(num(p, "max_iter", 100000));
  Trace trace;
  if (method == "prox-grad") {
    const CompositeProblem cp =
        random_composite(d, b, num(p, "lambda", 1.0), ctx.seed);
    trace = run_prox_grad(b, cp, Eigen::VectorXd::Zero(d), stop);
  } else {
    std::unique_ptr<Objective> f;
    if (problem == "quadratic") {
      f = std::make_unique<QuadraticProblem>(random_quadratic(d, b, ctx.seed));
    } else if (problem == "piecewise") {
      f = std::make_unique<PiecewiseQuadraticProblem>(
          random_piecewise_quadratic(d, b, ctx.seed));
    } else {
      throw UsageError("unknown problem '" + problem + "' (quadratic, piecewise)");
    }
    const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(d);
    if (method == "implicit-hb") {
      const auto* q = dynamic_cast<const QuadraticProblem*>(f.get());
      if (q == nullptr) throw UsageError("implicit-hb runs on quadratics only");
      trace = run_implicit_hb(b, num(p, "rho"), *q, x0, stop);
    } else if (method == "implicit-gd") {
      trace = run_implicit_prox(b, num(p, "rho"), *f, x0, stop);
    } else {
      trace = run_lti(build_spec(p), *f, x0, stop);
    }
  }
  std::ostringstream csv;
  write_trace_csv(csv, trace, {ctx.hash, ctx.seed, static_cast<int>(num(p, "subsample", 1))});
  fs::create_directories(ctx.out);
  write_file(ctx.out / "trace.csv", csv.str());
  json j;
  j["iterations"] = trace.terminated_at;
  j["stop_reason"] = to_string(trace.stop_reason);
  j["final_error"] = trace.err_norm.back();
  j["grad_evals"] = trace.grad_evals.back();
  try {
    const RateEstimate r = empirical_rate(trace);
    j["empirical_rate"] = r.rho_hat;
    j["rate_flagged"] = r.flagged;
  } catch (const Error&) {
    j["empirical_rate"] = nullptr;
  }
  j["trace_csv"] = (ctx.out / "trace.csv").string();
  return j;
}

json cmd_fig4(const json& p, const Context& ctx) {
  tools::Fig4Config c;
  c.seed = ctx.seed;
  c.d = static_cast<int>(num(p, "d", c.d));
  c.mu = num(p, "mu", c.mu);
  c.ell = num(p, "ell", c.ell);
  c.tol = num(p, "tol", c.tol);
  c.max_iter = static_cast<long long>(num(p, "max_iter", static_cast<double>(c.max_iter)));
  if (p.contains("alphas")) c.alphas = parse_list(str(p, "alphas", ""));
  const tools::Fig4Report r = tools::bench_fig4(c);
  std::ostringstream csv;
  tools::write_fig4_csv(csv, r);
  fs::create_directories(ctx.out);
  write_file(ctx.out / "fig4.csv", csv.str());
  json j = tools::fig4_summary(r);
  j["csv"] = (ctx.out / "fig4.csv").string();
  return j;
}

json cmd_fig5(const json& p, const Context& ctx) {
  tools::Fig5Config c;
  c.seed = ctx.seed;
  c.d = static_cast<int>(num(p, "d", c.d));
  c.mu = num(p, "mu", c.mu);
  c.ell = num(p, "ell", c.ell);
  c.lambda = num(p, "lambda", c.lambda);
  c.tol = num(p, "tol", c.tol);
  c.max_iter = static_cast<long long>(num(p, "max_iter", static_cast<double>(c.max_iter)));
  const tools::Fig5Report r = tools::bench_fig5(c);
  fs::create_directories(ctx.out);
  std::ostringstream trace, env;
  write_trace_csv(trace, r.trace,
                  {r.hash, c.seed, static_cast<int>(num(p, "subsample", 1))});
  tools::write_fig5_envelope_csv(env, r);
  write_file(ctx.out / "fig5_trace.csv", trace.str());
  write_file(ctx.out / "fig5_envelope.csv", env.str());
  json j = tools::fig5_summary(r);
  j["trace_csv"] = (ctx.out / "fig5_trace.csv").string();
  j["envelope_csv"] = (ctx.out / "fig5_envelope.csv").string();
  return j;
}

void print_error(const std::string& code, const std::string& message) {
  std::cerr << json{{"error", code}, {"message", message}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"marginopt: algorithm synthesis by robust control"};
  app.require_subcommand(1);
  Context ctx;
  std::string config_path;
  app.add_option("--seed", ctx.seed, "RNG seed for generated problems");
  app.add_option("--out", ctx.out, "output directory for artifacts");
  app.add_option("--config", config_path, "JSON run config");

  std::map<std::string, Options> opts;
  using Handler = json (*)(const json&, const Context&);
  std::map<const CLI::App*, Handler> handlers;
  std::map<const CLI::App*, std::string> names;

  auto budget_opts = [&](CLI::App* s, Options& o) {
    add(s, o, "mu", "strong convexity");
    add(s, o, "ell", "smoothness (omit for mu-only)");
  };
  auto method_opts = [&](CLI::App* s, Options& o) {
    add(s, o, "method", "gd, optimal-gd, heavy-ball, implicit-hb, implicit-gd, splitting");
    add(s, o, "rho", "target rate");
    add(s, o, "alpha", "step size for gd");
    budget_opts(s, o);
  };

  auto* synth = app.add_subcommand("synth", "synthesize an algorithm");
  method_opts(synth, opts["synth"]);
  handlers[synth] = cmd_synth;

  auto* margin = app.add_subcommand("margin", "gain-margin analysis and design");
  for (auto n : {"pole", "ratio", "k1", "k2", "grid"}) add(margin, opts["margin"], n, n);
  handlers[margin] = cmd_margin;

  auto* lift = app.add_subcommand("lift", "lift a periodic or LTI algorithm");
  add(lift, opts["lift"], "steps", "periodic gradient steps, e.g. 0.1,0.2,0.3");
  add(lift, opts["lift"], "G", "transfer function JSON {\"num\":[..],\"den\":[..]}");
  add(lift, opts["lift"], "period", "lifting period for --G");
  handlers[lift] = cmd_lift;

  auto* certify = app.add_subcommand("certify", "rate certificates");
  method_opts(certify, opts["certify"]);
  for (auto n : {"gamma", "a", "b", "k1", "k2", "points", "radius"}) {
    add(certify, opts["certify"], n, n);
  }
  handlers[certify] = cmd_certify;

  auto* run = app.add_subcommand("run", "simulate an algorithm on a problem");
  method_opts(run, opts["run"]);
  for (auto n : {"problem", "d", "lambda", "tol", "max-iter", "subsample"}) {
    add(run, opts["run"], n, n);
  }
  handlers[run] = cmd_run;

  auto* bench = app.add_subcommand("bench", "figure reproductions");
  bench->require_subcommand(1);
  auto* fig4 = bench->add_subcommand("fig4", "gradient count versus alpha");
  for (auto n : {"d", "mu", "ell", "tol", "max-iter", "alphas"}) add(fig4, opts["fig4"], n, n);
  handlers[fig4] = cmd_fig4;
  auto* fig5 = bench->add_subcommand("fig5", "proximal gradient envelope");
  for (auto n : {"d", "mu", "ell", "lambda", "tol", "max-iter", "subsample"}) {
    add(fig5, opts["fig5"], n, n);
  }
  handlers[fig5] = cmd_fig5;

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error("InvalidArgument", e.what());
    return 1;
  }

  try {
    const CLI::App* active = nullptr;
    std::string name;
    for (auto& [sub, h] : handlers) {
      if (sub->parsed()) {
        active = sub;
        name = sub->get_name();
      }
    }
    if (active == nullptr) throw UsageError("no command given");
    const std::string command = name == "fig4" || name == "fig5" ? "bench " + name : name;

    json file_params = json::object();
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw UsageError("cannot read config " + config_path);
      const json cfg = json::parse(f);
      if (!cfg.is_object()) throw UsageError("config must be a JSON object");
      for (const auto& [k, v] : cfg.items()) {
        if (k != "command" && k != "parameters" && k != "seed" && k != "output_dir") {
          throw UsageError("unknown config key '" + k + "'");
        }
      }
      if (cfg.contains("command") && cfg["command"] != command) {
        throw UsageError("config is for '" + cfg["command"].get<std::string>() + "'");
      }
      if (cfg.contains("parameters")) file_params = cfg["parameters"];
      if (cfg.contains("seed") && app.count("--seed") == 0) {
        ctx.seed = cfg["seed"].get<std::uint64_t>();
      }
      if (cfg.contains("output_dir") && app.count("--out") == 0) {
        ctx.out = cfg["output_dir"].get<std::string>();
      }
    }
    const json params = resolve(active, opts.at(name), file_params);
    const json resolved = {{"command", command},
                           {"parameters", params},
                           {"seed", ctx.seed},
                           {"output_dir", ctx.out.string()}};
    ctx.hash = tools::config_hash(resolved);
    json report = handlers.at(active)(params, ctx);
    report["config"] = resolved;
    report["config_hash"] = ctx.hash;
    report["seed"] = ctx.seed;
    std::cout << report.dump(2) << "\n";
    return 0;
  } catch (const Error& e) {
    print_error(std::string(to_string(e.code())), e.what());
    return is_numerical_failure(e.code()) ? 2 : 1;
  } catch (const UsageError& e) {
    print_error("InvalidArgument", e.what());
    return 1;
  } catch (const json::exception& e) {
    print_error("InvalidArgument", e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("InvalidArgument", e.what());
    return 1;
  }
}
