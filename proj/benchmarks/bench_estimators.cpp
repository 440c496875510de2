// Full-estimator benchmarks on a fixed scenario draw, plus one bootstrap
// round-trip; these are the units the simulation harness repeats thousands
// of times.
#include <benchmark/benchmark.h>

#include "medmediate/estimators.hpp"
#include "medmediate/inference.hpp"
#include "medmediate/rng.hpp"
#include "medmediate/scenario.hpp"

using namespace medmediate;

namespace {

const Dataset& fixed_dataset() {
    static const Dataset ds = generate_dataset(scenario_spec(2), 2000, 42);
    return ds;
}

EstimatorConfig config_for(Method m) {
    EstimatorConfig cfg;
    cfg.method = m;
    cfg.rng_seed = 7;
    cfg.n_imputation_draws = 500;
    cfg.n_quasibayes_draws = 200;
    return cfg;
}

}  // namespace

static void BM_estimator(benchmark::State& state) {
    const Method m = static_cast<Method>(state.range(0));
    const Dataset& ds = fixed_dataset();
    const EstimatorConfig cfg = config_for(m);
    for (auto _ : state) {
        const EffectEstimates e = estimate(m, ds, cfg);
        benchmark::DoNotOptimize(e.te);
    }
    state.SetLabel(to_string(m));
}
BENCHMARK(BM_estimator)
    ->DenseRange(0, 5, 1)  // all six methods
    ->Unit(benchmark::kMillisecond);

static void BM_bootstrap_difference(benchmark::State& state) {
    const Dataset& ds = fixed_dataset();
    const EstimatorConfig cfg = config_for(Method::Difference);
    BootstrapPlan plan;
    plan.n_resamples = static_cast<std::size_t>(state.range(0));
    plan.seed = 11;
    for (auto _ : state) {
        const BootstrapResult r = bootstrap_ci(ds, Method::Difference, cfg, plan);
        benchmark::DoNotOptimize(r.estimates.te);
    }
}
BENCHMARK(BM_bootstrap_difference)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
