#include <benchmark/benchmark.h>

#include <vector>

#include "msteer/engine.hpp"
#include "msteer/maxent.hpp"
#include "msteer/planner.hpp"
#include "msteer/realizer.hpp"
#include "msteer/sampler.hpp"

namespace {

using namespace msteer;

MomentSequence gaussian_moments(double mu, double sigma, int order) {
    return moments_of_density(DensitySpec::gaussian(mu, sigma), order);
}

void BM_propagate(benchmark::State& state) {
    const int order = static_cast<int>(state.range(0));
    MomentSequence x = gaussian_moments(0.0, 1.0, order);
    MomentSequence u = gaussian_moments(0.5, 1.5, order);
    for (auto _ : state) {
        benchmark::DoNotOptimize(propagate(x, u, 0.6));
    }
}
BENCHMARK(BM_propagate)->Arg(2)->Arg(4);

void BM_derive_plan(benchmark::State& state) {
    const int horizon = static_cast<int>(state.range(0));
    SystemSchedule sched(horizon, 2, std::vector<double>(horizon, 0.6));
    MomentSequence x0 = gaussian_moments(0.0, 1.0, 2);
    MomentSequence xT = gaussian_moments(1.0, 2.0, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(derive_plan(x0, xT, sched));
    }
}
BENCHMARK(BM_derive_plan)->Arg(4)->Arg(10);

void BM_minimize(benchmark::State& state) {
    const int nodes = static_cast<int>(state.range(0));
    ReferenceDensity ref = ReferenceDensity::gaussian(0.0, 1.0);
    QuadratureGrid grid = make_grid(Support::real_line(), ref, nodes);
    HankelMatrix sigma = hankel_of(MomentSequence(
        2, (Eigen::VectorXd(4) << 0.3, 1.2, 0.5, 4.0).finished()));
    for (auto _ : state) {
        benchmark::DoNotOptimize(minimize(sigma, ref, grid));
    }
}
BENCHMARK(BM_minimize)->Arg(256)->Arg(512)->Arg(1024);

void BM_fit_maxent(benchmark::State& state) {
    MomentSequence m = gaussian_moments(1.0, 2.0, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_maxent(m, Support::real_line()));
    }
}
BENCHMARK(BM_fit_maxent);

void BM_sample_ensemble(benchmark::State& state) {
    const int agents = static_cast<int>(state.range(0));
    ReferenceDensity ref = ReferenceDensity::gaussian(0.0, 1.0);
    QuadratureGrid grid = make_grid(Support::real_line(), ref, 512);
    RationalDensity target = minimize(hankel_of(gaussian_moments(0.0, 1.0, 2)), ref, grid);
    CandidateDensity cand = CandidateDensity::default_for(target);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            sample_ensemble(target, cand, agents, RngStream(1u, 2u)));
    }
    state.SetItemsProcessed(state.iterations() * agents);
}
BENCHMARK(BM_sample_ensemble)->Arg(1000)->Arg(10000);

void BM_occupation_run(benchmark::State& state) {
    RngStream init(3u, 1u);
    std::vector<double> xs(static_cast<size_t>(state.range(0)));
    for (auto& x : xs) {
        x = init.normal();
    }
    SystemSchedule sched(4, 2, {0.6, 0.6, 0.6, 0.6});
    for (auto _ : state) {
        benchmark::DoNotOptimize(run_occupation_steering(
            xs, DensitySpec::gaussian(1.0, 2.0), sched, Support::real_line(),
            RngStream(3u, 2u)));
    }
}
BENCHMARK(BM_occupation_run)->Arg(1000)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
