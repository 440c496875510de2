#include "medmediate/mediation_formula.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "medmediate/errors.hpp"
#include "medmediate/normal.hpp"

namespace medmediate {

CovariateLaw CovariateLaw::bernoulli_half() {
    CovariateLaw law;
    law.rows = {{0.0}, {1.0}};
    law.weights = {0.5, 0.5};
    return law;
}

CovariateLaw CovariateLaw::empirical(const Dataset& ds) {
    std::map<std::vector<double>, std::size_t> counts;
    std::vector<double> row(ds.n_covariates());
    for (std::size_t i = 0; i < ds.n_rows(); ++i) {
        for (std::size_t j = 0; j < ds.n_covariates(); ++j) row[j] = ds.covariate(j)[i];
        ++counts[row];
    }
    CovariateLaw law;
    const double n = static_cast<double>(ds.n_rows());
    for (const auto& [values, count] : counts) {
        law.rows.push_back(values);
        law.weights.push_back(static_cast<double>(count) / n);
    }
    return law;
}

namespace {

constexpr double kLatentSpan = 8.0;  // +-8 sd; Gaussian tail mass < 1e-15

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double inv_link(OutcomeLink link, double eta) {
    return link == OutcomeLink::Logit ? expit(eta) : std::exp(eta);
}

struct RowContext {
    double base;  // outcome linear predictor minus mediator terms
    double lp1;   // mediator 1 linear predictor at its exposure setting
    double lp2;
};

// Mean over the mediator pair for one covariate row.
MeanResult row_mean(const CounterfactualQuery& q, const RowContext& ctx) {
    const OutcomeModel& om = q.outcome;
    const MediatorLaw& law = q.mediators;
    const double cm1 = om.coef_m1;
    const double cm2 = om.coef_m2;
    const double c12 = om.coef_interaction;

    // Outcome free of the mediators: the mediator law integrates out
    // exactly, which keeps null-path effect ratios identically one.
    if (cm1 == 0.0 && cm2 == 0.0 && c12 == 0.0)
        return {inv_link(om.link, ctx.base), 0.0};

    const bool b1 = law.kind1 == MediatorKind::Binary;
    const bool b2 = law.kind2 == MediatorKind::Binary;
    const double rho = law.rho;

    if (b1 && b2) {
        const double p1 = norm_cdf(ctx.lp1);
        const double p2 = norm_cdf(ctx.lp2);
        const double both = bvn_cdf(ctx.lp1, ctx.lp2, rho);
        const double p11 = std::max(0.0, both);
        const double p10 = std::max(0.0, p1 - both);
        const double p01 = std::max(0.0, p2 - both);
        const double p00 = std::max(0.0, 1.0 - p1 - p2 + both);
        const double value = p11 * inv_link(om.link, ctx.base + cm1 + cm2 + c12) +
                             p10 * inv_link(om.link, ctx.base + cm1) +
                             p01 * inv_link(om.link, ctx.base + cm2) +
                             p00 * inv_link(om.link, ctx.base);
        return {value, 4e-10};  // orthant probabilities are 1e-10-accurate
    }

    if (!b1 && !b2) {
        const double coupling = std::sqrt(1.0 - rho * rho);
        const auto f = [&](double z1, double z2) {
            const double m1 = ctx.lp1 + law.eq1.sigma * z1;
            const double m2 = ctx.lp2 + law.eq2.sigma * (rho * z1 + coupling * z2);
            const double eta = ctx.base + cm1 * m1 + cm2 * m2 + c12 * m1 * m2;
            return norm_pdf(z1) * norm_pdf(z2) * inv_link(om.link, eta);
        };
        IntegrationResult r = integrate_2d(f, {-kLatentSpan, -kLatentSpan},
                                           {kLatentSpan, kLatentSpan}, q.integration);
        return {r.value, r.abs_error};
    }

    // Mixed pair: integrate over the continuous mediator's residual and
    // use the conditional probit probability for the binary one.
    const double cond_scale = std::sqrt(1.0 - rho * rho);
    if (b1) {
        const auto f = [&](double z) {
            const double m2 = ctx.lp2 + law.eq2.sigma * z;
            const double p_m1 = norm_cdf((ctx.lp1 + rho * z) / cond_scale);
            const double eta1 = ctx.base + cm1 + (cm2 + c12) * m2;
            const double eta0 = ctx.base + cm2 * m2;
            return norm_pdf(z) *
                   (p_m1 * inv_link(om.link, eta1) + (1.0 - p_m1) * inv_link(om.link, eta0));
        };
        IntegrationResult r = integrate_1d(f, -kLatentSpan, kLatentSpan, q.integration);
        return {r.value, r.abs_error};
    }
    const auto f = [&](double z) {
        const double m1 = ctx.lp1 + law.eq1.sigma * z;
        const double p_m2 = norm_cdf((ctx.lp2 + rho * z) / cond_scale);
        const double eta1 = ctx.base + (cm1 + c12) * m1 + cm2;
        const double eta0 = ctx.base + cm1 * m1;
        return norm_pdf(z) *
               (p_m2 * inv_link(om.link, eta1) + (1.0 - p_m2) * inv_link(om.link, eta0));
    };
    IntegrationResult r = integrate_1d(f, -kLatentSpan, kLatentSpan, q.integration);
    return {r.value, r.abs_error};
}

}  // namespace

MeanResult counterfactual_mean(const CounterfactualQuery& q) {
    if (q.covariates.rows.size() != q.covariates.weights.size())
        throw UsageError("counterfactual_mean: covariate rows/weights mismatch");
    if (q.covariates.rows.empty())
        throw UsageError("counterfactual_mean: empty covariate law");
    if (!(std::abs(q.mediators.rho) < 1.0))
        throw UsageError("counterfactual_mean: |rho| must be < 1");
    const std::size_t ncov = q.covariates.rows[0].size();
    if (q.outcome.coef_covariates.size() != ncov ||
        q.mediators.eq1.coef_covariates.size() != ncov ||
        q.mediators.eq2.coef_covariates.size() != ncov)
        throw UsageError("counterfactual_mean: covariate coefficient lengths disagree");

    double value = 0.0;
    double err = 0.0;
    for (std::size_t c = 0; c < q.covariates.rows.size(); ++c) {
        const std::vector<double>& row = q.covariates.rows[c];
        if (row.size() != ncov)
            throw UsageError("counterfactual_mean: ragged covariate rows");
        RowContext ctx;
        ctx.base = q.outcome.intercept + q.outcome.coef_exposure * q.x_outcome +
                   dot(q.outcome.coef_covariates, row);
        ctx.lp1 = q.mediators.eq1.intercept + q.mediators.eq1.coef_exposure * q.x_med1 +
                  dot(q.mediators.eq1.coef_covariates, row);
        ctx.lp2 = q.mediators.eq2.intercept + q.mediators.eq2.coef_exposure * q.x_med2 +
                  dot(q.mediators.eq2.coef_covariates, row);
        const MeanResult r = row_mean(q, ctx);
        value += q.covariates.weights[c] * r.value;
        err += q.covariates.weights[c] * r.abs_error;
    }
    return {value, err};
}

OutcomeModel dgp_outcome_model(const ScenarioSpec& spec) {
    OutcomeModel om;
    om.link = OutcomeLink::Logit;
    om.intercept = spec.beta0;
    om.coef_exposure = spec.beta_x;
    om.coef_m1 = spec.beta_m1;
    om.coef_m2 = spec.beta_m2;
    om.coef_interaction = spec.beta_interaction;
    om.coef_covariates = {spec.beta_c};
    return om;
}

MediatorLaw dgp_mediator_law(const ScenarioSpec& spec) {
    MediatorLaw law;
    law.kind1 = spec.kind1;
    law.kind2 = spec.kind2;
    law.eq1 = {spec.m1_intercept, spec.m1_coef_x, {spec.m1_coef_c}, spec.sigma1};
    law.eq2 = {spec.m2_intercept, spec.m2_coef_x, {spec.m2_coef_c}, spec.sigma2};
    law.rho = spec.rho;
    return law;
}

MediatorLaw mediator_law_from_fit(const JointMediatorModel& fit) {
    auto to_equation = [](const glm::GlmFit& marginal, double sigma) {
        MediatorEquation eq;
        eq.intercept = marginal.coefficients[0];
        eq.coef_exposure = marginal.coefficients[1];
        eq.coef_covariates.assign(marginal.coefficients.data() + 2,
                                  marginal.coefficients.data() + marginal.coefficients.size());
        eq.sigma = sigma;
        return eq;
    };
    MediatorLaw law;
    law.kind1 = fit.kinds.first;
    law.kind2 = fit.kinds.second;
    law.eq1 = to_equation(fit.marginal_1, fit.sigma_1);
    law.eq2 = to_equation(fit.marginal_2, fit.sigma_2);
    law.rho = fit.rho;
    return law;
}

TrueEffects true_effects(const ScenarioSpec& spec) {
    CounterfactualQuery q;
    q.outcome = dgp_outcome_model(spec);
    q.mediators = dgp_mediator_law(spec);
    q.covariates = CovariateLaw::bernoulli_half();

    const auto mean_at = [&](int x, int x1, int x2) {
        CounterfactualQuery qq = q;
        qq.x_outcome = x;
        qq.x_med1 = x1;
        qq.x_med2 = x2;
        return counterfactual_mean(qq);
    };
    const MeanResult p111 = mean_at(1, 1, 1);
    const MeanResult p000 = mean_at(0, 0, 0);
    const MeanResult p100 = mean_at(1, 0, 0);
    const MeanResult p101 = mean_at(1, 0, 1);
    const MeanResult p110 = mean_at(1, 1, 0);

    TrueEffects eff;
    eff.te = p111.value / p000.value;
    eff.de = p100.value / p000.value;
    eff.ie = p111.value / p100.value;
    eff.ie1 = p111.value / p101.value;
    eff.ie2 = p111.value / p110.value;

    const auto ratio_err = [](double ratio, const MeanResult& num, const MeanResult& den) {
        return std::abs(ratio) * (num.abs_error / num.value + den.abs_error / den.value);
    };
    eff.estimated_abs_error = std::max({ratio_err(eff.te, p111, p000),
                                        ratio_err(eff.de, p100, p000),
                                        ratio_err(eff.ie, p111, p100),
                                        ratio_err(eff.ie1, p111, p101),
                                        ratio_err(eff.ie2, p111, p110)});
    return eff;
}

}  // namespace medmediate
