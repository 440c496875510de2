#include <algorithm>
#include <cmath>
#include <vector>

#include "estimators_internal.hpp"
#include "medmediate/errors.hpp"
#include "medmediate/estimators.hpp"
#include "medmediate/glm.hpp"
#include "medmediate/parallel.hpp"

namespace medmediate {

EffectEstimates estimate_regression(const Dataset& raw, const EstimatorConfig& cfg) {
    detail::check_config(Method::Regression, raw, cfg);
    const Dataset ds = detail::canonical_copy(raw);
    detail::check_arms_nonempty(ds);
    const std::size_t n = ds.n_rows();
    const std::size_t n_med = ds.n_mediators();
    const std::size_t n_cov = ds.n_covariates();
    const auto n_draws = static_cast<std::size_t>(cfg.n_imputation_draws);

    const Eigen::MatrixXd Xmc = detail::design_exposure_covariates(ds);
    const Eigen::VectorXd y = detail::outcome_vector(ds);
    const glm::GlmFit outcome_fit =
        glm::fit(glm::Family::ModifiedPoisson, detail::design_full(ds, false), y);

    // Marginal mediator models on exposure + covariates: modified Poisson
    // for binary mediators, linear for continuous ones.
    std::vector<glm::GlmFit> marginals;
    marginals.reserve(n_med);
    for (std::size_t k = 0; k < n_med; ++k) {
        Eigen::VectorXd mk(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) mk[static_cast<Eigen::Index>(i)] = ds.mediator(k)[i];
        const bool binary = ds.mediator_kind(k) == MediatorKind::Binary;
        marginals.push_back(
            glm::fit(binary ? glm::Family::ModifiedPoisson : glm::Family::Linear, Xmc, mk));
    }

    // Outcome coefficients by design_full layout: [1, x, m1..mK, c...].
    const Eigen::VectorXd& oc = outcome_fit.coefficients;
    const double exp_beta_x = std::exp(oc[1]);

    // Mediator linear predictors at both exposure settings, per subject.
    // Design layout of Xmc: [1, x, c...].
    std::vector<std::vector<double>> lp_at(2, std::vector<double>(n * n_med));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n_med; ++k) {
            double base = marginals[k].coefficients[0];
            for (std::size_t j = 0; j < n_cov; ++j)
                base += marginals[k].coefficients[2 + static_cast<Eigen::Index>(j)] *
                        ds.covariate(j)[i];
            lp_at[0][i * n_med + k] = base;
            lp_at[1][i * n_med + k] = base + marginals[k].coefficients[1];
        }
    }

    // Per-subject imputation: draws are keyed by (seed, x_med, canonical
    // rank), so results do not depend on threading or row order. The M(0)
    // draw set is shared between E[Y(0,M(0))] and E[Y(1,M(0))].
    struct Partial {
        double m11 = 0.0, m10 = 0.0, m00 = 0.0;
    };
    std::vector<Partial> partials(n);
    parallel_for(n, [&](std::size_t i) {
        double cov_term = 0.0;
        for (std::size_t j = 0; j < n_cov; ++j)
            cov_term += oc[2 + static_cast<Eigen::Index>(n_med + j)] * ds.covariate(j)[i];
        const double eta_base0 = oc[0] + cov_term;  // x_out = 0, no mediators

        std::vector<double> m_draw(n_med);
        Partial acc;
        for (int x_med = 0; x_med <= 1; ++x_med) {
            Rng rng(derive_key(cfg.rng_seed, 0x9E6u, static_cast<std::uint64_t>(x_med), i));
            double sum_eta0 = 0.0;
            for (std::size_t d = 0; d < n_draws; ++d) {
                double med_term = 0.0;
                for (std::size_t k = 0; k < n_med; ++k) {
                    const double lp = lp_at[x_med][i * n_med + k];
                    double value;
                    if (ds.mediator_kind(k) == MediatorKind::Binary) {
                        const double p = std::clamp(std::exp(lp), 0.0, 1.0);
                        value = rng.bernoulli(p) ? 1.0 : 0.0;
                    } else {
                        value = lp + marginals[k].residual_sd * rng.normal();
                    }
                    med_term += oc[2 + static_cast<Eigen::Index>(k)] * value;
                }
                sum_eta0 += std::exp(eta_base0 + med_term);
            }
            const double mean0 = sum_eta0 / static_cast<double>(n_draws);
            if (x_med == 1) {
                acc.m11 = mean0 * exp_beta_x;  // x_out = 1 shifts eta by beta_x
            } else {
                acc.m00 = mean0;
                acc.m10 = mean0 * exp_beta_x;
            }
        }
        partials[i] = acc;
    });

    double m11 = 0.0, m10 = 0.0, m00 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        m11 += partials[i].m11;
        m10 += partials[i].m10;
        m00 += partials[i].m00;
    }
    m11 /= static_cast<double>(n);
    m10 /= static_cast<double>(n);
    m00 /= static_cast<double>(n);

    EffectEstimates out;
    out.method = Method::Regression;
    out.te = m11 / m00;
    out.de = m10 / m00;
    out.ie = m11 / m10;
    return out;
}

}  // namespace medmediate
