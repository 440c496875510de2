// Counterfactual means E[Y(x, M1(x'), M2(x''))] by integrating an outcome
// model against the joint mediator law (the mediation formula), used both
// with fitted models and with true data-generating parameters.
#pragma once

#include <vector>

#include "medmediate/cubature.hpp"
#include "medmediate/dataset.hpp"
#include "medmediate/joint_mediators.hpp"
#include "medmediate/scenario.hpp"

namespace medmediate {

enum class OutcomeLink { Log, Logit };

/// Outcome regression on (exposure, two mediators, optional product term,
/// covariates). Log-link means above 1 are used unclipped: the estimand is
/// a ratio of means and truncation would bias it.
struct OutcomeModel {
    OutcomeLink link = OutcomeLink::Logit;
    double intercept = 0.0;
    double coef_exposure = 0.0;
    double coef_m1 = 0.0;
    double coef_m2 = 0.0;
    double coef_interaction = 0.0;  // coefficient on m1*m2
    std::vector<double> coef_covariates;
};

/// One mediator's equation on the latent (binary) or observed (continuous)
/// scale: value = intercept + coef_exposure*x + coef_covariates.c + eps,
/// eps ~ N(0, sigma^2); binary mediators threshold at zero (sigma = 1).
struct MediatorEquation {
    double intercept = 0.0;
    double coef_exposure = 0.0;
    std::vector<double> coef_covariates;
    double sigma = 1.0;
};

struct MediatorLaw {
    MediatorKind kind1 = MediatorKind::Continuous;
    MediatorKind kind2 = MediatorKind::Continuous;
    MediatorEquation eq1;
    MediatorEquation eq2;
    double rho = 0.0;
};

/// Discrete covariate mixing law: weighted rows, weights summing to one.
struct CovariateLaw {
    std::vector<std::vector<double>> rows;
    std::vector<double> weights;

    /// Single binary covariate C ~ Bernoulli(0.5).
    static CovariateLaw bernoulli_half();
    /// Distinct covariate rows of the dataset weighted by frequency.
    static CovariateLaw empirical(const Dataset& ds);
};

struct CounterfactualQuery {
    int x_outcome = 1;
    int x_med1 = 1;  // exposure setting generating M1
    int x_med2 = 1;  // exposure setting generating M2
    OutcomeModel outcome;
    MediatorLaw mediators;
    CovariateLaw covariates;
    IntegrationOptions integration{};
};

struct MeanResult {
    double value = 0.0;
    double abs_error = 0.0;
};

/// The mediation formula: sum over covariate rows of the outcome mean
/// integrated against the counterfactual mediator distribution. Continuous
/// dimensions use adaptive cubature over +-8 latent standard deviations;
/// binary dimensions sum exactly over {0,1} with probit/orthant
/// probabilities. Throws IntegrationError when the tolerance cannot be met.
MeanResult counterfactual_mean(const CounterfactualQuery& q);

struct TrueEffects {
    double te = 1.0;
    double de = 1.0;
    double ie = 1.0;
    double ie1 = 1.0;
    double ie2 = 1.0;
    double estimated_abs_error = 0.0;  // largest propagated error across effects
};

/// Ground truth for a scenario: TE = E[Y(1,M(1,1))]/E[Y(0,M(0,0))],
/// DE = E[Y(1,M(0,0))]/E[Y(0,M(0,0))], IE = E[Y(1,M(1,1))]/E[Y(1,M(0,0))],
/// IE1 = E[Y(1,M(1,1))]/E[Y(1,M(0,1))], IE2 = E[Y(1,M(1,1))]/E[Y(1,M(1,0))].
TrueEffects true_effects(const ScenarioSpec& spec);

/// The generating outcome model (Logit link) of a scenario.
OutcomeModel dgp_outcome_model(const ScenarioSpec& spec);

/// The generating mediator law of a scenario.
MediatorLaw dgp_mediator_law(const ScenarioSpec& spec);

/// View of a fitted joint mediator model as a MediatorLaw.
MediatorLaw mediator_law_from_fit(const JointMediatorModel& fit);

}  // namespace medmediate
