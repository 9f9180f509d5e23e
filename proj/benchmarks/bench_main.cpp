#include <benchmark/benchmark.h>

#include <random>

#include "dfrc/grid.hpp"
#include "dfrc/opt.hpp"
#include "dfrc/random.hpp"
#include "dfrc/solvers.hpp"
#include "dfrc/waveform.hpp"

using namespace dfrc;

static void BM_AmbiguitySurface(benchmark::State& state) {
  const int K = int(state.range(0)), M = int(state.range(1));
  const PowerGrid p = PowerGrid::uniform(K, M, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(ambiguity_surface(p.values, K / 4, 0.3));
}
BENCHMARK(BM_AmbiguitySurface)->Args({32, 8})->Args({128, 32})->Args({1024, 64});

static void BM_MlEstimate(benchmark::State& state) {
  const int K = int(state.range(0)), M = int(state.range(1)), K_G = K / 4;
  Rng rng = derive_stream(1, 0);
  SymbolGrid X(K, M);
  for (int m = 0; m < M; ++m)
    for (int k = 0; k < K; ++k) X(k, m) = complex_normal(rng, 1.0);
  EchoParams e;
  e.bin = {1, 1};
  e.sigma_n2 = 0.1;
  const SymbolGrid Y = synthesize_echo(X, e, rng);
  MlEstimator est(K, K_G, M);
  for (auto _ : state) benchmark::DoNotOptimize(est(Y, X));
}
BENCHMARK(BM_MlEstimate)->Args({32, 8})->Args({32, 16})->Args({256, 64});

static void BM_SolveQp(benchmark::State& state) {
  const int n = int(state.range(0));
  Rng rng = derive_stream(2, 0);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = nd(rng);
  Eigen::VectorXd c(n);
  for (int i = 0; i < n; ++i) c(i) = nd(rng);
  QpProblem q = QpProblem::make(G * G.transpose(), c);
  q.A = Eigen::MatrixXd::Ones(1, n);
  q.b = Eigen::VectorXd::Ones(1);
  q.lower = Eigen::VectorXd::Zero(n);
  for (auto _ : state) benchmark::DoNotOptimize(solve_qp(q));
}
BENCHMARK(BM_SolveQp)->Arg(16)->Arg(64)->Arg(256);

static void BM_OptimizePsk(benchmark::State& state) {
  const OfdmConfig cfg = OfdmConfig::standard(32, 8, int(state.range(0)));
  const auto eps = epsilon_samples(8);
  const double P = db_to_linear(double(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(optimize_psk(cfg, P, cfg.radar_sigma2(), eps));
}
BENCHMARK(BM_OptimizePsk)->Args({16, -15})->Args({16, 10})->Args({32, 0})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
