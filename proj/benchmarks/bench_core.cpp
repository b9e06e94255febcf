#include "maslov/evolution.hpp"
#include "maslov/fd_oracle.hpp"
#include "maslov/morse.hpp"
#include "maslov/star_graph.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace maslov;

LagrangianFrame random_frame(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix a(n, n), b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      a(i, j) = Complex(g(rng), g(rng));
      b(i, j) = Complex(g(rng), g(rng));
    }
  // symmetrize into a Lagrangian frame: X = I, Y Hermitian
  const Matrix h = 0.5 * (a + a.adjoint());
  return LagrangianFrame(Matrix::Identity(n, n), h);
}

void BM_PairMatrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(7);
  const LagrangianFrame f1 = random_frame(n, rng);
  const LagrangianFrame f2 = random_frame(n, rng);
  for (auto _ : state) benchmark::DoNotOptimize(pair_matrix(f1, f2).W);
}
BENCHMARK(BM_PairMatrix)->Arg(2)->Arg(5)->Arg(10);

void BM_DecayingEvolution(benchmark::State& state) {
  StarGraphNLS cfg;
  cfg.n = static_cast<int>(state.range(0));
  cfg.p = 1.0;
  const HalfLineSystem sys = build_system(cfg);
  TruncationConfig trunc;
  trunc.x_inf = 12.0;
  trunc.settle_tol = 1e-6;
  for (auto _ : state) benchmark::DoNotOptimize(evolve_decaying_frame(sys, 0.0, trunc).grid.size());
}
BENCHMARK(BM_DecayingEvolution)->Arg(2)->Arg(5);

void BM_OracleCount(benchmark::State& state) {
  StarGraphNLS cfg;
  cfg.n = 3;
  cfg.p = 1.0;
  const HalfLineSystem sys = build_system(cfg);
  const Discretization d = discretize(sys, 20.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(d.count_below_tau(0.0));
}
BENCHMARK(BM_OracleCount)->Arg(800)->Arg(1600);

void BM_MorseTarget0(benchmark::State& state) {
  StarGraphNLS cfg;
  cfg.n = 2;
  cfg.p = 1.0;
  const HalfLineSystem sys = build_system(cfg);
  for (auto _ : state) {
    const MorseReport rep = morse_via_target0(sys, 0.0);
    benchmark::DoNotOptimize(rep.morse_index);
  }
}
BENCHMARK(BM_MorseTarget0)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
