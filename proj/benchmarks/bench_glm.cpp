// GLM engine benchmarks: IRLS fits on simulated scenario data.
#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "medmediate/glm.hpp"
#include "medmediate/rng.hpp"
#include "medmediate/scenario.hpp"

using namespace medmediate;

namespace {

struct FitProblem {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
};

// Outcome-model design (intercept, exposure, both mediators, covariate)
// from a scenario-2 draw: the shape every estimator fits repeatedly.
FitProblem make_problem(std::size_t n) {
    const Dataset ds = generate_dataset(scenario_spec(2), n, 42);
    FitProblem p;
    p.X.resize(static_cast<Eigen::Index>(n), 5);
    p.y.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = static_cast<Eigen::Index>(i);
        p.X(j, 0) = 1.0;
        p.X(j, 1) = ds.exposure()[i];
        p.X(j, 2) = ds.mediator(0)[i];
        p.X(j, 3) = ds.mediator(1)[i];
        p.X(j, 4) = ds.covariate(0)[i];
        p.y[j] = ds.outcome()[i];
    }
    return p;
}

}  // namespace

static void BM_fit_logistic(benchmark::State& state) {
    const FitProblem p = make_problem(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        const glm::GlmFit fit = glm::fit(glm::Family::Logistic, p.X, p.y);
        benchmark::DoNotOptimize(fit.coefficients);
    }
}
BENCHMARK(BM_fit_logistic)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

static void BM_fit_modified_poisson(benchmark::State& state) {
    const FitProblem p = make_problem(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        const glm::GlmFit fit = glm::fit(glm::Family::ModifiedPoisson, p.X, p.y);
        benchmark::DoNotOptimize(fit.coefficients);
    }
}
BENCHMARK(BM_fit_modified_poisson)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

static void BM_fit_probit(benchmark::State& state) {
    const FitProblem p = make_problem(static_cast<std::size_t>(state.range(0)));
    // Probit on the first (binary) mediator given exposure and covariate.
    Eigen::MatrixXd X = p.X(Eigen::all, std::vector<int>{0, 1, 4});
    Eigen::VectorXd m1 = p.X.col(2);
    for (auto _ : state) {
        const glm::GlmFit fit = glm::fit(glm::Family::Probit, X, m1);
        benchmark::DoNotOptimize(fit.coefficients);
    }
}
BENCHMARK(BM_fit_probit)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);
