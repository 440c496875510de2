// Simulation benchmark: run estimators over replicated draws from a
// scenario and score them against the truth oracle (percent bias, MSE,
// interval coverage, mean interval width).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "medmediate/effects.hpp"
#include "medmediate/inference.hpp"
#include "medmediate/mediation_formula.hpp"
#include "medmediate/scenario.hpp"

namespace medmediate {

/// One (scenario, method, effect) metrics row.
struct MetricsRecord {
    int scenario = 0;
    Method method = Method::Difference;
    std::string effect;  // "te", "de", "ie", "ie1", "ie2"
    double truth = 1.0;
    double percent_bias = 0.0;  // 100 * (mean(est) - truth) / truth
    double mse = 0.0;
    double coverage = 0.0;  // fraction of intervals containing the truth
    double mean_width = 0.0;
    std::size_t n_used = 0;  // replicates where the method succeeded
};

struct ScenarioResult {
    std::vector<MetricsRecord> records;
    TrueEffects truth;
    double achieved_prevalence = 0.0;  // marginal P(Y=1) under the spec
    std::size_t n_replicates = 0;      // replicates requested
};

/// Runs `n_replicates` independent datasets of size `n` through every
/// requested method, with bootstrap intervals (quasi-Bayes intervals for
/// Jerolon), and aggregates the four metrics per (method, effect).
/// Replicates where a method fails (FitError/IntegrationError) are dropped
/// for that method and reflected in n_used. Deterministic in (spec, seed,
/// n_replicates, n, plan) and independent of thread count. The interaction
/// term is passed to the methods that support it when spec.interaction is
/// set. Throws if the truth oracle fails.
ScenarioResult run_scenario(const ScenarioSpec& spec, std::size_t n_replicates, std::size_t n,
                            const std::vector<Method>& methods, const BootstrapPlan& plan,
                            std::uint64_t seed);

/// Aggregates one (scenario, method, effect) cell from the successful
/// replicates: percent_bias = 100*(mean(estimates) - truth)/truth, mse =
/// mean squared error, coverage = fraction of intervals containing the
/// truth, mean_width over the intervals, n_used = estimates.size().
/// Metrics with no data (no successes, or no intervals) come back NaN.
MetricsRecord summarize_effect(int scenario, Method method, const std::string& effect,
                               double truth, const std::vector<double>& estimates,
                               const std::vector<IntervalEstimate>& intervals);

enum class ResultsFormat { Csv, Json };

/// Writes records losslessly (shortest round-trip doubles). CSV columns:
/// scenario,method,effect,truth,percent_bias,mse,coverage,mean_width,n_used.
void export_results(const std::vector<MetricsRecord>& records, const std::string& path,
                    ResultsFormat format);

/// Reads records written by export_results; the format is detected from
/// the content (JSON array vs CSV header).
std::vector<MetricsRecord> import_results(const std::string& path);

/// Marginal outcome prevalence P(Y=1) implied by a scenario, computed by
/// integrating the outcome model over the covariate, exposure, and
/// mediator laws with the truth-oracle machinery.
double marginal_prevalence(const ScenarioSpec& spec);

/// Computes the achieved prevalence and throws UsageError when it falls
/// outside [0.25, 0.4], the design's target band; returns it otherwise.
double check_prevalence(const ScenarioSpec& spec);

/// Intercept beta0 that makes marginal_prevalence hit `target` (bisection;
/// prevalence is increasing in beta0). Does not modify `spec`.
double calibrate_beta0(const ScenarioSpec& spec, double target);

}  // namespace medmediate
