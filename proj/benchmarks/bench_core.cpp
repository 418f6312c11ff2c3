#include <benchmark/benchmark.h>

#include "geolin/catalog.hpp"
#include "geolin/curvature.hpp"
#include "geolin/dynamics.hpp"
#include "geolin/expr.hpp"
#include "geolin/jet.hpp"
#include "geolin/system.hpp"

using namespace geolin;

static void BM_JetProduct(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Jet a(n), b(n);
  for (int i = 0; i < n; ++i) {
    a = a + Jet::variable(n, i, 0.3 + 0.1 * i);
    b = b * Jet::variable(n, i, 1.1 + 0.05 * i);
  }
  for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_JetProduct)->Arg(2)->Arg(4)->Arg(8)->Arg(16);

static void BM_EvalJet(benchmark::State& state) {
  Expr e = parse("v/u^2 - 0.3*u*v + exp(u - v)*sin(u + v)");
  double p[2] = {0.8, 1.3};
  for (auto _ : state)
    benchmark::DoNotOptimize(eval_jet(e, p, {"u", "v"}, {}));
}
BENCHMARK(BM_EvalJet);

static void BM_CurvatureEval(benchmark::State& state) {
  SystemSpec s = catalog_get("reissner-nordstrom").system;
  MetricField lift = eisenhart_lift(s);
  double p[4] = {1.0, 1.0, 0.1, 0.0};
  for (auto _ : state) {
    CurvatureEval ev(lift, p);
    benchmark::DoNotOptimize(ev.weyl_norm());
  }
}
BENCHMARK(BM_CurvatureEval);

static void BM_IntegrateStep(benchmark::State& state) {
  const CatalogEntry& e = catalog_get("szekeres");
  auto qd = project_to_constraint(e.system, e.fixture.q0, e.fixture.direction);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        integrate(e.system, e.fixture.q0, qd, 0.01, 1e-3));
}
BENCHMARK(BM_IntegrateStep);

BENCHMARK_MAIN();
