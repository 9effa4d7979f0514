//
// wingbem -- Kernel, assembly and solve timings.
//
#include "wingbem/kutta.hpp"
#include "wingbem/quadrature.hpp"
#include "wingbem/wake.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace wingbem;

namespace {

DofLayout baseline(int uniform, int degree) {
  WingSpec s;
  s.alpha_deg = 8.5;
  RefinementPolicy p;
  p.n_uniform = uniform;
  return distribute_dofs(refine(build_initial_grid(s, WakeSpec{}), p), degree);
}

}  // namespace

static void BM_DuffyRule(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(duffy_singular(n, Vec2(0.3, 0.7)));
}
BENCHMARK(BM_DuffyRule)->Arg(6)->Arg(12);

static void BM_FinitePart(benchmark::State& state) {
  const CellMap map({Vec3(0, 0, 0), Vec3(1, 0, 0.1), Vec3(0, 1, 0), Vec3(1, 1, 0.2)}, 1);
  for (auto _ : state) benchmark::DoNotOptimize(finite_part_hypersingular(map, Vec2(0.4, 0.6), 16, 16));
}
BENCHMARK(BM_FinitePart);

static void BM_BodyRow(benchmark::State& state) {
  const auto d = baseline(3, 1);
  const FlowConditions f;
  std::vector<int> rows;
  for (int i = 0; i < d.size(); ++i)
    if (d.kind[i] == DofKind::body || d.kind[i] == DofKind::te_leeward) rows.push_back(i);
  std::size_t k = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_body_row(rows[k], d, f));
    k = (k + 37) % rows.size();
  }
}
BENCHMARK(BM_BodyRow);

static void BM_AssembleSystem(benchmark::State& state) {
  const auto d = baseline(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_system(d, FlowConditions{}));
  state.counters["dofs"] = d.size();
}
BENCHMARK(BM_AssembleSystem)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_NewtonSolve(benchmark::State& state) {
  const auto d = baseline(static_cast<int>(state.range(0)), 1);
  const FlowConditions f;
  const auto sys = assemble_system(d, f);
  const VelocityRecovery rec(d, f);
  for (auto _ : state) benchmark::DoNotOptimize(newton_solve(sys, d, rec, NewtonOptions{}, f));
  state.counters["dofs"] = d.size();
}
BENCHMARK(BM_NewtonSolve)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_WakeVelocity(benchmark::State& state) {
  const auto d = baseline(3, 1);
  const FlowConditions f;
  const auto sys = assemble_system(d, f);
  const auto st = newton_solve(sys, d, VelocityRecovery(d, f), NewtonOptions{}, f);
  for (auto _ : state) benchmark::DoNotOptimize(wake_velocity(d, st.phi, f));
}
BENCHMARK(BM_WakeVelocity)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
