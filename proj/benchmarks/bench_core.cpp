#include <benchmark/benchmark.h>

#include "marginopt/certificates.hpp"
#include "marginopt/gain_margin.hpp"
#include "marginopt/lifting.hpp"
#include "marginopt/problems.hpp"
#include "marginopt/rates.hpp"
#include "marginopt/runtime.hpp"
#include "marginopt/synthesis.hpp"
#include "marginopt_tools/bench.hpp"

using namespace marginopt;

static void BM_PolynomialRoots(benchmark::State& state) {
  std::vector<double> c(state.range(0) + 1);
  for (size_t i = 0; i < c.size(); ++i) c[i] = 1.0 / (1.0 + i);
  const Polynomial p(c);
  for (auto _ : state) benchmark::DoNotOptimize(p.roots());
}
BENCHMARK(BM_PolynomialRoots)->Arg(4)->Arg(16)->Arg(32);

static void BM_WorstCaseRateHeavyBall(benchmark::State& state) {
  const RateBudget b = RateBudget::finite(1.0, 100.0);
  const TransferFunction G = heavy_ball(b).scalar_G();
  for (auto _ : state) benchmark::DoNotOptimize(worst_case_rate(G, b));
}
BENCHMARK(BM_WorstCaseRateHeavyBall);

static void BM_RateCertificate(benchmark::State& state) {
  const RateBudget b = RateBudget::finite(1.0, 9.0);
  const TransferFunction G = optimal_gradient_descent(b).scalar_G();
  for (auto _ : state) benchmark::DoNotOptimize(rate_certificate(G, b));
}
BENCHMARK(BM_RateCertificate)->Unit(benchmark::kMillisecond);

static void BM_NPSolve(benchmark::State& state) {
  const std::vector<InterpolationNode> nodes{InterpolationNode::infinity(0.0),
                                             InterpolationNode::finite(1.5, 0.3),
                                             InterpolationNode::finite(-2.0, 0.1)};
  for (auto _ : state) benchmark::DoNotOptimize(np_solve(nodes));
}
BENCHMARK(BM_NPSolve);

static void BM_LiftPeriodicGD(benchmark::State& state) {
  std::vector<double> steps(state.range(0));
  for (size_t i = 0; i < steps.size(); ++i) steps[i] = 0.1 * (1 + i % 3);
  for (auto _ : state) benchmark::DoNotOptimize(lift_periodic_gd({steps}));
}
BENCHMARK(BM_LiftPeriodicGD)->Arg(2)->Arg(4)->Arg(6);

static void BM_RunHeavyBall(benchmark::State& state) {
  const RateBudget b = RateBudget::finite(1.0, 100.0);
  const int d = static_cast<int>(state.range(0));
  const QuadraticProblem f = random_quadratic(d, b, 1);
  const AlgorithmSpec spec = heavy_ball(b);
  StopCriteria stop;
  stop.tol = 1e-10;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_lti(spec, f, Eigen::VectorXd::Zero(d), stop));
  }
}
BENCHMARK(BM_RunHeavyBall)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_InnerProx(benchmark::State& state) {
  const RateBudget b = RateBudget::finite(0.01, 100.0);
  const PiecewiseQuadraticProblem h = random_piecewise_quadratic(100, b, 0);
  const Eigen::VectorXd x = Eigen::VectorXd::Ones(100);
  const double alpha = static_cast<double>(state.range(0)) / 10.0;
  for (auto _ : state) {
    GradientCounter g(h);
    benchmark::DoNotOptimize(inner_prox(g, alpha, x));
  }
}
BENCHMARK(BM_InnerProx)->Arg(1)->Arg(10);

// Desk-scale figure runs.
static void BM_Fig4Small(benchmark::State& state) {
  tools::Fig4Config c;
  c.d = 20;
  c.alphas = {0.1, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(tools::bench_fig4(c));
}
BENCHMARK(BM_Fig4Small)->Unit(benchmark::kMillisecond)->Iterations(1);

static void BM_Fig5Small(benchmark::State& state) {
  tools::Fig5Config c;
  c.d = 200;
  for (auto _ : state) benchmark::DoNotOptimize(tools::bench_fig5(c));
}
BENCHMARK(BM_Fig5Small)->Unit(benchmark::kMillisecond)->Iterations(1);
BENCHMARK_MAIN();
