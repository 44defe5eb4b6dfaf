#include <benchmark/benchmark.h>

#include "tmboson/algebra.hpp"
#include "tmboson/bethe.hpp"
#include "tmboson/diffop.hpp"
#include "tmboson/oracle.hpp"
#include "tmboson/qes.hpp"

namespace {

const tmb::ModelParams kModel22{2, 2, 0.3, -0.4, 0.7, 0.2, -0.1, 0.8};
const tmb::ModelParams kModel33{3, 3, 0.3, -0.4, 0.7, 0.2, -0.1, 0.8};

void BM_BuildBlockMatrices(benchmark::State& state) {
  const tmb::BlockLabel label{static_cast<int>(state.range(0)), 1, 1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(tmb::build_block_matrices(kModel33, label));
  }
}
BENCHMARK(BM_BuildBlockMatrices)->Arg(4)->Arg(8)->Arg(16);

void BM_BuildDiffOperator(benchmark::State& state) {
  const tmb::BlockLabel label{static_cast<int>(state.range(0)), 1, 1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(tmb::build_diff_operator(kModel33, label));
  }
}
BENCHMARK(BM_BuildDiffOperator)->Arg(4)->Arg(8);

void BM_OracleStates(benchmark::State& state) {
  const tmb::BlockLabel label{static_cast<int>(state.range(0)), 0, 1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(tmb::oracle_states(kModel22, label));
  }
}
BENCHMARK(BM_OracleStates)->Arg(4)->Arg(8)->Arg(16);

void BM_SolveBaeSeeded(benchmark::State& state) {
  const tmb::BlockLabel label{static_cast<int>(state.range(0)), 0, 1};
  tmb::SolverConfig config;
  config.oracle_seeding = true;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tmb::solve_bae(kModel22, label, config));
  }
}
BENCHMARK(BM_SolveBaeSeeded)->Arg(3)->Arg(6);

void BM_SolveBaeMultistart(benchmark::State& state) {
  const tmb::BlockLabel label{static_cast<int>(state.range(0)), 0, 1};
  tmb::SolverConfig config;
  config.oracle_seeding = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tmb::solve_bae(kModel22, label, config));
  }
}
BENCHMARK(BM_SolveBaeMultistart)->Arg(3)->Arg(6);

void BM_FdEigenvalues(benchmark::State& state) {
  auto harmonic = [](double x) { return x * x; };
  for (auto _ : state) {
    benchmark::DoNotOptimize(tmb::fd_eigenvalues(harmonic, 8.0, static_cast<int>(state.range(0)), 8));
  }
}
BENCHMARK(BM_FdEigenvalues)->Arg(1000)->Arg(4000);

}  // namespace

BENCHMARK_MAIN();
