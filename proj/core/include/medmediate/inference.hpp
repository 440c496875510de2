// Nonparametric bootstrap percentile confidence intervals (all methods
// except Jerolon, which carries its own quasi-Bayesian intervals).
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "medmediate/dataset.hpp"
#include "medmediate/effects.hpp"

namespace medmediate {

struct BootstrapPlan {
    std::size_t n_resamples = 200;
    double level = 0.95;
    std::uint64_t seed = 0;
    // Failure policy is drop-and-record: resamples where the estimator
    // throws FitError/IntegrationError are dropped and counted, with a
    // hard error once more than 10% fail.
};

struct BootstrapResult {
    EffectEstimates estimates;        // point estimates from the full data
    std::size_t n_resamples_used = 0; // successful resamples
    std::size_t n_failed = 0;
};

using EstimatorFn = std::function<EffectEstimates(const Dataset&, const EstimatorConfig&)>;

/// Percentile interval over draws: with B sorted values and alpha = 1-level,
/// lower rank floor(alpha/2*(B+1)) and upper rank ceil((1-alpha/2)*(B+1)),
/// 1-based and clamped to [1, B].
IntervalEstimate percentile_interval(std::vector<double> draws, double level);

/// Resamples rows with replacement n_resamples times, reruns the complete
/// estimation pipeline per resample, and attaches percentile intervals to
/// the full-data point estimates. Deterministic given (plan.seed,
/// cfg.rng_seed) and independent of thread count.
BootstrapResult bootstrap_ci(const Dataset& ds, const EstimatorFn& estimator,
                             const EstimatorConfig& cfg, const BootstrapPlan& plan);

/// Convenience overload dispatching on method id; rejects Jerolon.
BootstrapResult bootstrap_ci(const Dataset& ds, Method method, const EstimatorConfig& cfg,
                             const BootstrapPlan& plan);

}  // namespace medmediate
