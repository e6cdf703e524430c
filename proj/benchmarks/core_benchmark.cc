#include <benchmark/benchmark.h>

#include "twostrain/equilibria.h"
#include "twostrain/model.h"
#include "twostrain/simulate.h"
#include "twostrain/stability.h"

namespace {

using namespace twostrain;

Model coexistence_model() {
  ModelParams p;
  p.Lambda = 200;
  p.mu = 0.02;
  p.r = 0.01;
  p.k = 2e-5;
  p.gamma1 = 0.07;
  p.gamma2 = 0.09;
  p.v1 = 0.1;
  p.v2 = 0.1;
  return {p, IncidenceSpec::saturated_i2(2e-4, 1e-4), IncidenceSpec::saturated_s(2e-4, 1e-4)};
}

Model strain_two_model() {
  Model m = coexistence_model();
  m.params.r = 0.1;
  m.strain1 = IncidenceSpec::saturated_i2(3e-5, 0.7);
  m.strain2 = IncidenceSpec::saturated_s(2e-4, 1e-3);
  return m;
}

void BM_Thresholds(benchmark::State& state) {
  const Model model = coexistence_model();
  for (auto _ : state) benchmark::DoNotOptimize(thresholds(model));
}
BENCHMARK(BM_Thresholds);

void BM_SolveAll(benchmark::State& state) {
  const Model model = coexistence_model();
  for (auto _ : state) benchmark::DoNotOptimize(solve_all(model));
}
BENCHMARK(BM_SolveAll)->Unit(benchmark::kMicrosecond);

void BM_ClassifyCoexistence(benchmark::State& state) {
  const Model model = coexistence_model();
  const auto e3 = solve_all(model).e3;
  for (auto _ : state) benchmark::DoNotOptimize(rh_E3(model, *e3));
}
BENCHMARK(BM_ClassifyCoexistence)->Unit(benchmark::kMicrosecond);

void BM_Integrate(benchmark::State& state) {
  const Model model = coexistence_model();
  IntegratorOptions opts;
  opts.t_end = static_cast<double>(state.range(0));
  const State x0{500, 500, 50, 50, {}};
  for (auto _ : state) benchmark::DoNotOptimize(integrate(model, x0, opts));
}
BENCHMARK(BM_Integrate)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_StrainTwoScan(benchmark::State& state) {
  const Model model = strain_two_model();
  const auto e2 = solve_E2(model);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(global_condition_E2(model, e2.roots.front(), n));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_StrainTwoScan)->Arg(50)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_CoexistenceLattice(benchmark::State& state) {
  const Model model = coexistence_model();
  const auto e3 = solve_all(model).e3;
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(global_condition_E3_lattice(model, *e3, n));
}
BENCHMARK(BM_CoexistenceLattice)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
