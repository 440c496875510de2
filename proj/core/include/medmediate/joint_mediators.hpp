// Joint model for two correlated mediators: marginal probit (binary) or
// linear (continuous) regressions coupled by a constant latent residual
// correlation rho, plus the bivariate normal CDF used for orthant
// probabilities.
#pragma once

#include <utility>

#include "medmediate/dataset.hpp"
#include "medmediate/glm.hpp"
#include "medmediate/rng.hpp"

namespace medmediate {

/// P(Z1 <= a, Z2 <= b) for a standard bivariate normal with correlation
/// rho; absolute error below 1e-10. Infinite arguments are allowed.
double bvn_cdf(double a, double b, double rho);

struct JointMediatorModel {
    glm::GlmFit marginal_1;  // Probit for a binary mediator, Linear otherwise
    glm::GlmFit marginal_2;
    double sigma_1 = 1.0;    // latent residual SD; fixed at 1 for binary
    double sigma_2 = 1.0;
    double rho = 0.0;        // latent residual correlation
    std::pair<MediatorKind, MediatorKind> kinds{MediatorKind::Continuous,
                                                MediatorKind::Continuous};
};

/// Fits the two marginal mediator regressions (each on exposure +
/// covariates) and then the residual correlation in a second stage:
/// Pearson correlation of OLS residuals (both continuous), conditional
/// likelihood of the binary given the continuous mediator (mixed), or
/// pairwise likelihood through bivariate probit orthants (both binary).
/// The dataset must have exactly two mediators. Throws FitError when
/// |rho| >= 0.999 ("degenerate mediator correlation") or a marginal fails.
JointMediatorModel fit_joint(const Dataset& ds);

/// Draws (M1(x1), M2(x2)) by sampling one latent residual pair from the
/// fitted bivariate normal and pushing each component through its own
/// linear predictor at its own exposure value; binary mediators threshold
/// the latent variable at zero. covariate_row holds the covariates in
/// schema order.
std::pair<double, double> sample_counterfactual_pair(const JointMediatorModel& model,
                                                     double x1, double x2,
                                                     const std::vector<double>& covariate_row,
                                                     Rng& rng);

}  // namespace medmediate
