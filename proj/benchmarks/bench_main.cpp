#include <benchmark/benchmark.h>

#include "decseq/infinite_horizon.hpp"
#include "decseq/oracle.hpp"
#include "decseq/seq_decomp.hpp"
#include "decseq/simulate.hpp"
#include "decseq/wald.hpp"
#include "support.hpp"

using namespace decseq;

static void BM_WaldFinite(benchmark::State& state) {
  int T = static_cast<int>(state.range(0));
  ProblemSpec s = test::sym02(1, T);
  auto rows = channel_rows(s.channel2, 1, T);
  for (auto _ : state) benchmark::DoNotOptimize(solve_wald_finite(rows, s.costs, T));
}
BENCHMARK(BM_WaldFinite)->Arg(5)->Arg(20)->Arg(80);

static void BM_WaldInfinite(benchmark::State& state) {
  ProblemSpec s = test::sym02(1, 1);
  GridOptions g;
  g.grid_size = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_wald_infinite(s.channel2, s.costs, g));
}
BENCHMARK(BM_WaldInfinite)->Arg(1001)->Arg(10001);

static void BM_Designer(benchmark::State& state) {
  Variant v = state.range(0) == 1 ? Variant::P1 : Variant::P2;
  int T = static_cast<int>(state.range(1));
  ProblemSpec s = test::sym02(T, T, v);
  for (auto _ : state) benchmark::DoNotOptimize(solve_designer(s));
}
BENCHMARK(BM_Designer)->Args({1, 2})->Args({1, 3})->Args({2, 2})->Args({2, 3})->Unit(benchmark::kMillisecond);

static void BM_Oracle(benchmark::State& state) {
  Variant v = state.range(0) == 1 ? Variant::P1 : Variant::P2;
  ProblemSpec s = test::sym02(2, 2, v);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_policies(s));
}
BENCHMARK(BM_Oracle)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

static void BM_Simulate(benchmark::State& state) {
  ProblemSpec s = test::sym02(2, 2);
  DesignerSolution sol = solve_p1(s);
  auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_cost(sol.o1, sol.o2, s, n, 7));
  state.SetItemsProcessed(static_cast<std::int64_t>(n) * state.iterations());
}
BENCHMARK(BM_Simulate)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_ExactCost(benchmark::State& state) {
  ProblemSpec s = test::drift(3, 3, Variant::P2);
  DesignerSolution sol = solve_p2(s);
  for (auto _ : state) benchmark::DoNotOptimize(exact_cost(sol.o1, sol.o2, s));
}
BENCHMARK(BM_ExactCost);
BENCHMARK_MAIN();
