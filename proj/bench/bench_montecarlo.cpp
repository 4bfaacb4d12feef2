// Serial reference vs OpenMP kernels. Both visit the same samples, so the
// counters reported here must agree.
#include <benchmark/benchmark.h>

#include "retrobell/montecarlo.hpp"
#include "retrobell/probability.hpp"

namespace {

using namespace retrobell;

const ModelParams kParams = nu_params(0.2);

void BM_McSerial(benchmark::State& state) {
    const auto [a, b] = coplanar_pair(120.0);
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        auto c = anticoincidence_counts_serial(a, b, kParams, SfpPolicy::Unbiased, n, 7);
        benchmark::DoNotOptimize(c);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_McParallel(benchmark::State& state) {
    const auto [a, b] = coplanar_pair(120.0);
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        auto c = anticoincidence_counts(a, b, kParams, SfpPolicy::Unbiased, n, 7);
        benchmark::DoNotOptimize(c);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SweepNu(benchmark::State& state) {
    std::vector<double> grid;
    for (int i = 1; i <= 40; ++i) grid.push_back(i / 100.0);
    for (auto _ : state) {
        auto rows = sweep_nu(grid, 120.0);
        benchmark::DoNotOptimize(rows);
    }
}

}  // namespace

BENCHMARK(BM_McSerial)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_McParallel)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepNu)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
