#include <benchmark/benchmark.h>

#include <cmath>

#include "cstat/higgs.hpp"
#include "cstat/tensor.hpp"
#include "cstat/tzitzeica.hpp"

using namespace cstat;

namespace {

ScalarField wave(const ChartPtr& c) {
  return ScalarField::sample(c, [](double x, double y) { return std::sin(6.0 * x) * std::cos(5.0 * y); });
}

ComplexField linear_q(const ChartPtr& c) {
  ComplexField q(c);
  for (std::size_t k : c->active_nodes()) q[k] = 0.5 + c->z(k);
  return q;
}

void BM_Laplacian(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ScalarField f = wave(Chart::torus(n, n));
  for (auto _ : state) benchmark::DoNotOptimize(laplacian(f));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_Laplacian)->RangeMultiplier(2)->Range(64, 1024);

void BM_Divergence3(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ChartPtr d = Chart::disk(n, n);
  const ConformalMetric g(wave(d));
  const Sym3Tensor C = build_C_from_moduli(AbelianDifferential{linear_q(d)}, CubicDifferential{linear_q(d)}, g);
  for (auto _ : state) benchmark::DoNotOptimize(divergence3(C, g));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_Divergence3)->RangeMultiplier(2)->Range(64, 512);

void BM_NewtonSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ComplexField q = linear_q(Chart::disk(n, n));
  for (auto _ : state) benchmark::DoNotOptimize(newton_solve(q, SolverConfig{}));
}
BENCHMARK(BM_NewtonSolve)->RangeMultiplier(2)->Range(32, 128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
