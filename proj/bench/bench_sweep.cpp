// Serial reference sweep against the OpenMP sweep over the same points.

#include <benchmark/benchmark.h>

#include "pseudosym/experiments.hpp"

using namespace pseudosym;

namespace {

std::vector<SchemeConfig> tokamak_points()
{
    SchemeConfig base;
    base.variant = Scheme::QImplicitSE;
    return sweep_points(base, {1, 2, 3, 4, 5, 6}, log_grid(0.02, 0.2, 20));
}

void BM_SweepSerial(benchmark::State& state)
{
    const TokamakModel tok;
    const auto points = tokamak_points();
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_sweep_serial(tok, points, tok.reference_state()));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(points.size()));
}

void BM_SweepParallel(benchmark::State& state)
{
    const TokamakModel tok;
    const auto points = tokamak_points();
    const int jobs = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_sweep_parallel(tok, points, tok.reference_state(), jobs));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(points.size()));
}

} // namespace

BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(0)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
