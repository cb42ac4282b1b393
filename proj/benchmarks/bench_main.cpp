#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include <curvlab/flow.hpp>
#include <curvlab/reduction.hpp>
#include <curvlab/stability.hpp>
#include <curvlab/unduloid.hpp>

using namespace curvlab;

namespace {

Vec bump(const GridCalculus& g) {
    return g.sample([&](double z) { return 0.4 * (1 + 0.05 * std::cos(std::numbers::pi * z / g.width())); });
}

void BM_SpectralDerivatives(benchmark::State& state) {
    const GridCalculus g(static_cast<int>(state.range(0)), 1.0);
    const Vec u = bump(g);
    Vec du, ddu;
    for (auto _ : state) {
        g.derivatives(u, du, ddu);
        benchmark::DoNotOptimize(ddu.data());
    }
}
BENCHMARK(BM_SpectralDerivatives)->Arg(64)->Arg(128)->Arg(256)->Arg(1024);

void BM_FullRhs(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    const GridCalculus g(N, 1.0);
    const RadialProfile p{3, 1.0, bump(g)};
    const auto F = make_mean_curvature(3);
    const WeightModel w = WeightModel::mixed(3, 1);
    for (auto _ : state) benchmark::DoNotOptimize(full_rhs(p, *F, w, g));
}
BENCHMARK(BM_FullRhs)->Arg(128)->Arg(256);

void BM_PsiSolve(benchmark::State& state) {
    const GridCalculus g(128, 1.0);
    const Vec ubar = g.project_meanzero(bump(g));
    const WeightModel w = WeightModel::mixed(3, 1);
    for (auto _ : state) benchmark::DoNotOptimize(psi_solve({ubar, 4.0}, 3, 1.0, w, g));
}
BENCHMARK(BM_PsiSolve);

void BM_EtaCurveSample(benchmark::State& state) {
    const int b = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(eta_curve({8, 1.0, 0.4}, b));
}
BENCHMARK(BM_EtaCurveSample)->Arg(0)->Arg(3);

void BM_UnduloidProfile(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(unduloid_profile({3, 1.0, 0.3}, 256));
}
BENCHMARK(BM_UnduloidProfile);

void BM_StabilityTable(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(stability_table(30, 12));
}
BENCHMARK(BM_StabilityTable);

void BM_FlowShortRun(benchmark::State& state) {
    FlowConfig f;
    f.n = 2;
    f.N = static_cast<int>(state.range(0));
    f.speed = make_mean_curvature(2);
    f.initial.R = 1.2 / std::numbers::pi;
    f.initial.modes = {{1, 0.05}};
    f.t_end = 0.05;
    f.record_every = 0.05;
    for (auto _ : state) benchmark::DoNotOptimize(integrate(f));
}
BENCHMARK(BM_FlowShortRun)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
