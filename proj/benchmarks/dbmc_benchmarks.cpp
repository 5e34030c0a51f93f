#include <benchmark/benchmark.h>

#include "dbmc/concentration_matrix.hpp"
#include "dbmc/consensus_sim.hpp"
#include "dbmc/diffusion_kernel.hpp"
#include "dbmc/network.hpp"
#include "dbmc/spectral.hpp"

namespace {

using namespace dbmc;

const MediumParams kMedium{2, 1.0, 0.1};

void BM_CumulativeResponse(benchmark::State& state) {
  const MediumParams md{static_cast<int>(state.range(0)), 1.0, 0.1};
  double x = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(cumulative_response(x, 1.0, md).value);
    x = x < 5.0 ? x + 0.01 : 0.5;
  }
}
BENCHMARK(BM_CumulativeResponse)->DenseRange(1, 3);

void BM_ClosedFormResponse(benchmark::State& state) {
  const MediumParams md{static_cast<int>(state.range(0)), 1.0, 0.1};
  double x = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(closed_form_response(x, 1.0, md).value);
    x = x < 5.0 ? x + 0.01 : 0.5;
  }
}
BENCHMARK(BM_ClosedFormResponse)->DenseRange(1, 3);

void BM_BuildConcentrationMatrix(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto g = grid_network(n, n, 0.7, kMedium);
  for (auto _ : state) benchmark::DoNotOptimize(build_concentration_matrix(g, 1.0).entries.data().data());
}
BENCHMARK(BM_BuildConcentrationMatrix)->RangeMultiplier(2)->Range(4, 16);

Matrix ring_matrix(std::size_t n) {
  const auto g = wrapped_line_network(n, 1.0, kMedium);
  return normalize(sparsify(build_concentration_matrix(g, 1.0), distance_matrix(g), 5),
                   NormalizationMode::uniform_S)
      .entries;
}

void BM_Jacobi(benchmark::State& state) {
  const auto m = ring_matrix(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eigendecompose_symmetric(m).lambda2);
}
BENCHMARK(BM_Jacobi)->RangeMultiplier(2)->Range(8, 128)->Unit(benchmark::kMillisecond);

void BM_Lambda2Power(benchmark::State& state) {
  const auto m = ring_matrix(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(lambda2_power(m, 1e-10).value);
}
BENCHMARK(BM_Lambda2Power)->RangeMultiplier(2)->Range(8, 64)->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State& state) {
  const auto m = ring_matrix(24);
  MonteCarloOptions opt;
  opt.trials = static_cast<std::size_t>(state.range(0));
  opt.epochs = 20;
  opt.seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo(m, opt).epochs.size());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarlo)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
