#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "estimators_internal.hpp"
#include "medmediate/errors.hpp"
#include "medmediate/estimators.hpp"
#include "medmediate/glm.hpp"
#include "medmediate/inference.hpp"
#include "medmediate/joint_mediators.hpp"
#include "medmediate/parallel.hpp"
#include "medmediate/stats.hpp"

namespace medmediate {

namespace {

constexpr std::uint64_t kParamTag = 0x50u;   // quasi-Bayes parameter stream
constexpr std::uint64_t kLatentTag = 0x4Cu;  // per-subject latent residual stream

}  // namespace

EffectEstimates estimate_jerolon(const Dataset& ds, const EstimatorConfig& cfg) {
    return detail::jerolon_with_covariance_scale(ds, cfg, 1.0);
}

namespace detail {

EffectEstimates jerolon_with_covariance_scale(const Dataset& raw, const EstimatorConfig& cfg,
                                              double covariance_scale) {
    detail::check_config(Method::Jerolon, raw, cfg);
    const Dataset ds = detail::canonical_copy(raw);
    detail::check_arms_nonempty(ds);
    const std::size_t n = ds.n_rows();
    const std::size_t n_cov = ds.n_covariates();
    const auto n_draws = static_cast<std::size_t>(cfg.n_quasibayes_draws);

    const glm::GlmFit outcome_fit =
        glm::fit(glm::Family::ModifiedPoisson, detail::design_full(ds, cfg.include_interaction),
                 detail::outcome_vector(ds));
    const JointMediatorModel joint = fit_joint(ds);

    // Quasi-Bayes parameter distributions: the outcome model uses its
    // sandwich covariance (the model-based one is invalid for a Poisson
    // fit to binary data), the mediator marginals their model covariance.
    // rho and the residual SDs stay fixed at their point estimates.
    const detail::MvnSampler outcome_sampler(outcome_fit.coefficients,
                                             covariance_scale * outcome_fit.covariance_robust);
    const detail::MvnSampler m1_sampler(joint.marginal_1.coefficients,
                                        covariance_scale * joint.marginal_1.covariance_model);
    const detail::MvnSampler m2_sampler(joint.marginal_2.coefficients,
                                        covariance_scale * joint.marginal_2.covariance_model);

    std::vector<std::vector<double>> cov_rows(n, std::vector<double>(n_cov));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n_cov; ++j) cov_rows[i][j] = ds.covariate(j)[i];

    // One latent residual stream per subject, keyed by canonical rank
    // only: the same epsilon pair is replayed for every mediator setting
    // and every parameter draw, so with a degenerate (zero) parameter
    // covariance all draws coincide exactly.
    std::vector<Rng> subject_rngs;
    subject_rngs.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        subject_rngs.emplace_back(derive_key(cfg.rng_seed, kLatentTag, i));

    const bool interaction = cfg.include_interaction;
    const Eigen::Index idx_interaction = 4 + static_cast<Eigen::Index>(n_cov);

    // Effects per accepted draw: te, de, ie, ie1, ie2.
    std::vector<std::optional<std::array<double, 5>>> per_draw(n_draws);
    parallel_for(n_draws, [&](std::size_t d) {
        Rng param_rng(derive_key(cfg.rng_seed, kParamTag, d));
        const Eigen::VectorXd op = outcome_sampler.draw(param_rng);
        JointMediatorModel jm = joint;
        jm.marginal_1.coefficients = m1_sampler.draw(param_rng);
        jm.marginal_2.coefficients = m2_sampler.draw(param_rng);

        const auto eta_mediators = [&](double v1, double v2, std::size_t i) {
            double eta = op[2] * v1 + op[3] * v2;
            if (interaction) eta += op[idx_interaction] * v1 * v2;
            for (std::size_t j = 0; j < n_cov; ++j)
                eta += op[4 + static_cast<Eigen::Index>(j)] * cov_rows[i][j];
            return eta;
        };

        double s111 = 0.0, s000 = 0.0, s101 = 0.0, s110 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            // The four counterfactual mediator settings share one latent
            // pair: each call replays a copy of the subject's stream.
            Rng r11 = subject_rngs[i];
            Rng r00 = subject_rngs[i];
            Rng r01 = subject_rngs[i];
            Rng r10 = subject_rngs[i];
            const auto [a1, a2] = sample_counterfactual_pair(jm, 1.0, 1.0, cov_rows[i], r11);
            const auto [b1, b2] = sample_counterfactual_pair(jm, 0.0, 0.0, cov_rows[i], r00);
            const auto [c1, c2] = sample_counterfactual_pair(jm, 0.0, 1.0, cov_rows[i], r01);
            const auto [d1, d2] = sample_counterfactual_pair(jm, 1.0, 0.0, cov_rows[i], r10);
            s111 += std::exp(op[0] + op[1] + eta_mediators(a1, a2, i));
            s000 += std::exp(op[0] + eta_mediators(b1, b2, i));
            s101 += std::exp(op[0] + op[1] + eta_mediators(c1, c2, i));
            s110 += std::exp(op[0] + op[1] + eta_mediators(d1, d2, i));
        }
        const double m111 = s111 / static_cast<double>(n);
        const double m000 = s000 / static_cast<double>(n);
        // E[Y(1, M(0,0))]: same mediator pairs as m000, exposure shifted.
        const double m100 = m000 * std::exp(op[1]);
        const double m101 = s101 / static_cast<double>(n);
        const double m110 = s110 / static_cast<double>(n);

        const bool ok = std::isfinite(m111) && std::isfinite(m000) && std::isfinite(m100) &&
                        std::isfinite(m101) && std::isfinite(m110) && m111 > 0.0 && m000 > 0.0 &&
                        m100 > 0.0 && m101 > 0.0 && m110 > 0.0;
        if (!ok) return;
        per_draw[d] = std::array<double, 5>{m111 / m000, m100 / m000, m111 / m100, m111 / m101,
                                            m111 / m110};
    });

    std::vector<double> te_draws, de_draws, ie_draws, ie1_draws, ie2_draws;
    te_draws.reserve(n_draws);
    de_draws.reserve(n_draws);
    ie_draws.reserve(n_draws);
    ie1_draws.reserve(n_draws);
    ie2_draws.reserve(n_draws);
    std::size_t n_rejected = 0;
    for (std::size_t d = 0; d < n_draws; ++d) {
        if (!per_draw[d]) {
            ++n_rejected;
            continue;
        }
        const auto& e = *per_draw[d];
        te_draws.push_back(e[0]);
        de_draws.push_back(e[1]);
        ie_draws.push_back(e[2]);
        ie1_draws.push_back(e[3]);
        ie2_draws.push_back(e[4]);
    }
    if (n_rejected * 100 > n_draws)
        throw FitError("quasi-Bayes draw rejection rate above 1% (" +
                       std::to_string(n_rejected) + " of " + std::to_string(n_draws) +
                       " draws rejected)");

    EffectEstimates out;
    out.method = Method::Jerolon;
    out.de = median(de_draws);
    out.ie = median(ie_draws);
    out.te = out.de * out.ie;  // preserves the decomposition identity exactly
    out.ie1 = median(ie1_draws);
    out.ie2 = median(ie2_draws);
    const auto qb_interval = [](std::vector<double> draws) {
        IntervalEstimate iv = percentile_interval(std::move(draws), 0.95);
        iv.source = IntervalSource::QuasiBayes;
        return iv;
    };
    out.te_interval = qb_interval(std::move(te_draws));
    out.de_interval = qb_interval(std::move(de_draws));
    out.ie_interval = qb_interval(std::move(ie_draws));
    out.ie1_interval = qb_interval(std::move(ie1_draws));
    out.ie2_interval = qb_interval(std::move(ie2_draws));
    return out;
}

}  // namespace detail

}  // namespace medmediate
