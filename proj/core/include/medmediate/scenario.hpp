// Data-generating process for the simulation study and the 16-scenario
// grid (mediator kinds x residual correlation x interaction).
#pragma once

#include <cstdint>

#include "medmediate/dataset.hpp"

namespace medmediate {

/// Complete description of one simulation setting. Defaults are the fixed
/// coefficients of the study design; tests and configs may override any of
/// them (e.g. zeroing the mediator path).
struct ScenarioSpec {
    int id = 0;  // 1..16 for grid scenarios, 0 for custom specs
    MediatorKind kind1 = MediatorKind::Continuous;
    MediatorKind kind2 = MediatorKind::Continuous;
    double rho = 0.0;          // latent residual correlation of (eps1, eps2)
    bool interaction = false;  // adds beta_interaction * M1*M2 to the outcome

    // Covariate: C ~ Bernoulli(0.5). Exposure: logit P(X=1|C) = a0 + a1*C.
    double exposure_intercept = -0.25;
    double exposure_coef_c = -1.0;

    // Mediator linear predictors LPk = intercept + coef_x*X + coef_c*C + eps_k;
    // continuous mediators observe LP, binary mediators observe I(LP > 0).
    double m1_intercept = -1.2;
    double m1_coef_x = 1.0;
    double m1_coef_c = 0.2;
    double sigma1 = 1.0;
    double m2_intercept = -1.5;
    double m2_coef_x = 1.5;
    double m2_coef_c = 0.5;
    double sigma2 = 1.0;

    // Outcome: logit P(Y=1) = beta0 + beta_x*X + beta_m1*M1 + beta_m2*M2
    //                         + beta_interaction*M1*M2 + beta_c*C.
    double beta0 = -2.0;
    double beta_x = 0.5;
    double beta_m1 = 1.5;
    double beta_m2 = 0.5;
    double beta_interaction = 0.0;  // 0.2 when interaction is true
    double beta_c = 1.5;
};

/// The grid: ids 1-12 cycle mediator kinds (two continuous; two binary;
/// one binary + one continuous) within blocks of three, with rho = 0,
/// 0.25, 0.5, 0.75 per block and no interaction; ids 13-16 are two
/// continuous mediators with rho = 0, 0.25, 0.5, 0.75 and the interaction
/// term switched on. Throws UsageError for ids outside 1..16.
ScenarioSpec scenario_spec(int id);

/// Mediator linear-predictor value before noise: intercept + coef_x*x + coef_c*c.
double mediator_linear_predictor(const ScenarioSpec& spec, int which, double x, double c);

/// Observed mediator for a given residual: continuous mediators return
/// lp + eps, binary mediators threshold at zero.
double mediator_value(const ScenarioSpec& spec, int which, double x, double c, double eps);

/// Samples n rows of (C, X, M1, M2, Y); column names are c, x, m1, m2, y.
/// Fixed draw order per row makes output a pure function of (spec, n, seed).
Dataset generate_dataset(const ScenarioSpec& spec, std::size_t n, std::uint64_t seed);

}  // namespace medmediate
