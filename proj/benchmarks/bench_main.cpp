#include <benchmark/benchmark.h>

#include "lowrate/distributions.hpp"
#include "lowrate/estimators.hpp"
#include "lowrate/renewal.hpp"

namespace {

using namespace lowrate;

void BM_SampleGaussianCurved(benchmark::State& state) {
    const IncrementModel model = IncrementModel::gaussian_curved(4.0, 4.0);
    RngStream g(1, 0, 0, 0);
    for (auto _ : state) benchmark::DoNotOptimize(model.sample(g));
}
BENCHMARK(BM_SampleGaussianCurved);

void BM_SampleGamma(benchmark::State& state) {
    const IncrementModel model = IncrementModel::gamma(2.0, 0.5);
    RngStream g(1, 0, 0, 0);
    for (auto _ : state) benchmark::DoNotOptimize(model.sample(g));
}
BENCHMARK(BM_SampleGamma);

void BM_SimulateTraceHitting(benchmark::State& state) {
    const IncrementModel model = IncrementModel::gaussian_curved(4.0, 4.0);
    const SamplingScheme scheme = SamplingScheme::hitting_one_sided(40.0);
    const std::int64_t t = state.range(0);
    std::uint64_t rep = 0;
    for (auto _ : state) {
        RngStream g(1, rep++, 0, 0);
        benchmark::DoNotOptimize(simulate_trace(model, scheme, t, g));
    }
    state.SetItemsProcessed(state.iterations() * t);
}
BENCHMARK(BM_SimulateTraceHitting)->Arg(1000)->Arg(10000);

void BM_EstimateHat(benchmark::State& state) {
    const IncrementModel model = IncrementModel::gaussian_curved(4.0, 4.0);
    const SamplingScheme scheme = SamplingScheme::hitting_one_sided(40.0);
    RngStream g(1, 0, 0, 0);
    const RenewalTrace trace = simulate_trace(model, scheme, 10000, g);
    for (auto _ : state)
        benchmark::DoNotOptimize(estimate(trace, EstimatorKind::Hat));
}
BENCHMARK(BM_EstimateHat);

void BM_GaussianWConstant(benchmark::State& state) {
    double c = 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(gaussian_w_constant(c));
        c += 1e-9;  // defeat any caching above this call
    }
}
BENCHMARK(BM_GaussianWConstant);

} // namespace

BENCHMARK_MAIN();
