// Numeric kernel benchmarks: normal helpers, bivariate normal CDF, and the
// truth-oracle counterfactual integration.
#include <benchmark/benchmark.h>

#include "medmediate/joint_mediators.hpp"
#include "medmediate/mediation_formula.hpp"
#include "medmediate/normal.hpp"
#include "medmediate/rng.hpp"
#include "medmediate/scenario.hpp"

using namespace medmediate;

static void BM_norm_cdf(benchmark::State& state) {
    double x = -4.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(norm_cdf(x));
        x += 1e-4;
        if (x > 4.0) x = -4.0;
    }
}
BENCHMARK(BM_norm_cdf);

static void BM_norm_quantile(benchmark::State& state) {
    double p = 0.01;
    for (auto _ : state) {
        benchmark::DoNotOptimize(norm_quantile(p));
        p += 1e-5;
        if (p > 0.99) p = 0.01;
    }
}
BENCHMARK(BM_norm_quantile);

static void BM_bvn_cdf(benchmark::State& state) {
    const double rho = 0.01 * static_cast<double>(state.range(0));
    double a = -2.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(bvn_cdf(a, -a, rho));
        a += 1e-3;
        if (a > 2.0) a = -2.0;
    }
}
BENCHMARK(BM_bvn_cdf)->Arg(0)->Arg(50)->Arg(95);

static void BM_true_effects(benchmark::State& state) {
    const ScenarioSpec spec = scenario_spec(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(true_effects(spec));
    }
}
// Scenario 1: two continuous mediators (2-D cubature); scenario 5: two
// binary mediators (exact orthant sums); scenario 12: mixed.
BENCHMARK(BM_true_effects)->Arg(1)->Arg(5)->Arg(12)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
