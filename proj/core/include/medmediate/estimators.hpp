// The six mediation estimators. Every estimator is a pure function of
// (dataset, config): internal Monte Carlo is keyed from cfg.rng_seed and
// rows are processed in canonical content order, so results are identical
// across row permutations and thread counts.
#pragma once

#include <Eigen/Dense>

#include "medmediate/dataset.hpp"
#include "medmediate/effects.hpp"
#include "medmediate/rng.hpp"

namespace medmediate {

/// Difference method: modified Poisson fits of Y~X+C (total effect) and
/// Y~X+M+C (direct effect); IE = exp(phi1 - theta1).
EffectEstimates estimate_difference(const Dataset& ds, const EstimatorConfig& cfg);

/// Imputation-based regression method: marginal mediator models drawn
/// independently per mediator (correlation deliberately ignored), outcome
/// means averaged over imputation draws.
EffectEstimates estimate_regression(const Dataset& ds, const EstimatorConfig& cfg);

/// Inverse-probability-weighting method: stabilized exposure weights from
/// logistic X~C, weighted outcome means per arm, and an outcome-model
/// imputation for E[Y(1, M(0,0))] on the unexposed arm.
EffectEstimates estimate_weighting(const Dataset& ds, const EstimatorConfig& cfg);

/// Inverse odds ratio weighting: logistic X~M+C supplies mediator-driven
/// odds factors; DE from a weighted modified Poisson Y~X+C, TE unweighted,
/// IE = TE/DE.
EffectEstimates estimate_iorw(const Dataset& ds, const EstimatorConfig& cfg);

/// Wang's method: joint mediator model plus mediation-formula integration
/// of the fitted log-link outcome model; reports path-specific IE1/IE2.
EffectEstimates estimate_wang(const Dataset& ds, const EstimatorConfig& cfg);

/// Jerolon's method: quasi-Bayesian parameter draws propagated through
/// counterfactual mediator simulation; medians as point estimates and
/// percentile draws as intervals (no bootstrap needed). Reports IE1/IE2.
EffectEstimates estimate_jerolon(const Dataset& ds, const EstimatorConfig& cfg);

/// Dispatch by method id.
EffectEstimates estimate(Method method, const Dataset& ds, const EstimatorConfig& cfg);

/// Draw from N(mean, cov) using an eigendecomposition square root with
/// negative eigenvalues clamped to zero; cov = 0 returns the mean itself.
Eigen::VectorXd mvn_draw(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, Rng& rng);

}  // namespace medmediate
