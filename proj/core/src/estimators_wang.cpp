#include <vector>

#include "estimators_internal.hpp"
#include "medmediate/errors.hpp"
#include "medmediate/estimators.hpp"
#include "medmediate/glm.hpp"
#include "medmediate/joint_mediators.hpp"
#include "medmediate/mediation_formula.hpp"

namespace medmediate {

EffectEstimates estimate_wang(const Dataset& raw, const EstimatorConfig& cfg) {
    detail::check_config(Method::Wang, raw, cfg);
    const Dataset ds = detail::canonical_copy(raw);
    detail::check_arms_nonempty(ds);

    const glm::GlmFit outcome_fit =
        glm::fit(glm::Family::ModifiedPoisson, detail::design_full(ds, false),
                 detail::outcome_vector(ds));
    const Eigen::VectorXd& oc = outcome_fit.coefficients;

    OutcomeModel outcome;
    outcome.link = OutcomeLink::Log;
    outcome.intercept = oc[0];
    outcome.coef_exposure = oc[1];
    outcome.coef_m1 = oc[2];
    outcome.coef_m2 = oc[3];
    outcome.coef_interaction = 0.0;
    outcome.coef_covariates.assign(oc.data() + 4, oc.data() + oc.size());

    const JointMediatorModel joint = fit_joint(ds);

    CounterfactualQuery q;
    q.outcome = outcome;
    q.mediators = mediator_law_from_fit(joint);
    q.covariates = CovariateLaw::empirical(ds);

    const auto mean_at = [&](int x_out, int x_m1, int x_m2) {
        q.x_outcome = x_out;
        q.x_med1 = x_m1;
        q.x_med2 = x_m2;
        return counterfactual_mean(q).value;
    };

    const double m_1_11 = mean_at(1, 1, 1);
    const double m_0_00 = mean_at(0, 0, 0);
    const double m_1_00 = mean_at(1, 0, 0);
    const double m_1_01 = mean_at(1, 0, 1);
    const double m_1_10 = mean_at(1, 1, 0);

    EffectEstimates out;
    out.method = Method::Wang;
    out.te = m_1_11 / m_0_00;
    out.de = m_1_00 / m_0_00;
    out.ie = m_1_11 / m_1_00;
    out.ie1 = m_1_11 / m_1_01;
    out.ie2 = m_1_11 / m_1_10;
    return out;
}

}  // namespace medmediate
