// Internal helpers shared by the estimator translation units.
#pragma once

#include <Eigen/Dense>

#include "medmediate/dataset.hpp"
#include "medmediate/effects.hpp"
#include "medmediate/rng.hpp"

namespace medmediate::detail {

/// Copy of the dataset with rows in canonical content order. All
/// estimators work on this copy, which makes every estimate invariant
/// under row permutations of the input.
Dataset canonical_copy(const Dataset& ds);

/// [1, c...]: intercept and covariates (exposure model design).
Eigen::MatrixXd design_covariates(const Dataset& ds);

/// [1, x, c...]: intercept, exposure, covariates.
Eigen::MatrixXd design_exposure_covariates(const Dataset& ds);

/// [1, m1..mK, c...]: mediators and covariates (IORW exposure model).
Eigen::MatrixXd design_mediators_covariates(const Dataset& ds);

/// [1, x, m1..mK, c...] plus a trailing m1*m2 column when interaction is
/// set (requires exactly two mediators).
Eigen::MatrixXd design_full(const Dataset& ds, bool interaction);

Eigen::VectorXd outcome_vector(const Dataset& ds);
Eigen::VectorXd exposure_vector(const Dataset& ds);

/// Throws UsageError when the config is illegal for the method
/// (interaction capability, mediator-count requirements, draw counts,
/// truncation quantile range).
void check_config(Method method, const Dataset& ds, const EstimatorConfig& cfg);

/// Throws FitError when an exposure arm is empty (bootstrap resamples can
/// produce this; it must be droppable, hence FitError not UsageError).
void check_arms_nonempty(const Dataset& ds);

/// Jerolon with the quasi-Bayes parameter covariances multiplied by
/// `covariance_scale`. The public estimator uses 1; tests use 0 to pin the
/// degenerate quasi-posterior contract (all draws identical, zero-width
/// intervals), which only holds because subjects' latent residual streams
/// are keyed independently of the draw index.
EffectEstimates jerolon_with_covariance_scale(const Dataset& ds, const EstimatorConfig& cfg,
                                              double covariance_scale);

/// Precomputed sampler for N(mean, cov): eigendecomposition square root
/// with negative eigenvalues clamped. Each draw consumes exactly
/// mean.size() normals, so RNG alignment is independent of cov.
class MvnSampler {
  public:
    MvnSampler(Eigen::VectorXd mean, const Eigen::MatrixXd& cov);
    Eigen::VectorXd draw(Rng& rng) const;

  private:
    Eigen::VectorXd mean_;
    Eigen::MatrixXd transform_;
};

}  // namespace medmediate::detail
