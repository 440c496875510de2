#include "medmediate/estimators.hpp"

#include <cmath>
#include <string>

#include "estimators_internal.hpp"
#include "medmediate/errors.hpp"
#include "medmediate/glm.hpp"
#include "medmediate/normal.hpp"
#include "medmediate/stats.hpp"

namespace medmediate {

std::string to_string(Method m) {
    switch (m) {
        case Method::Difference: return "difference";
        case Method::Regression: return "regression";
        case Method::Weighting: return "weighting";
        case Method::IORW: return "iorw";
        case Method::Wang: return "wang";
        case Method::Jerolon: return "jerolon";
    }
    return "?";
}

std::optional<Method> method_from_string(const std::string& text) {
    if (text == "difference") return Method::Difference;
    if (text == "regression") return Method::Regression;
    if (text == "weighting") return Method::Weighting;
    if (text == "iorw") return Method::IORW;
    if (text == "wang") return Method::Wang;
    if (text == "jerolon") return Method::Jerolon;
    return std::nullopt;
}

MethodCapabilities capabilities(Method m) {
    MethodCapabilities c;
    c.path_specific = m == Method::Wang || m == Method::Jerolon;
    c.interaction_supported = m == Method::Weighting || m == Method::Jerolon;
    c.bootstrap_required = m != Method::Jerolon;
    c.requires_two_mediators = m == Method::Wang || m == Method::Jerolon;
    return c;
}

namespace detail {

Dataset canonical_copy(const Dataset& ds) { return ds.subset(ds.canonical_row_order()); }

namespace {

Eigen::MatrixXd with_intercept(const Dataset& ds, bool exposure, bool mediators,
                               bool covariates, bool interaction) {
    const auto n = static_cast<Eigen::Index>(ds.n_rows());
    const std::size_t n_med = mediators ? ds.n_mediators() : 0;
    const std::size_t n_cov = covariates ? ds.n_covariates() : 0;
    const Eigen::Index p = 1 + (exposure ? 1 : 0) + static_cast<Eigen::Index>(n_med + n_cov) +
                           (interaction ? 1 : 0);
    Eigen::MatrixXd X(n, p);
    Eigen::Index col = 0;
    X.col(col++).setOnes();
    if (exposure) {
        for (Eigen::Index i = 0; i < n; ++i)
            X(i, col) = ds.exposure()[static_cast<std::size_t>(i)];
        ++col;
    }
    for (std::size_t k = 0; k < n_med; ++k, ++col)
        for (Eigen::Index i = 0; i < n; ++i)
            X(i, col) = ds.mediator(k)[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < n_cov; ++j, ++col)
        for (Eigen::Index i = 0; i < n; ++i)
            X(i, col) = ds.covariate(j)[static_cast<std::size_t>(i)];
    if (interaction) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto r = static_cast<std::size_t>(i);
            X(i, col) = ds.mediator(0)[r] * ds.mediator(1)[r];
        }
        ++col;
    }
    return X;
}

}  // namespace

Eigen::MatrixXd design_covariates(const Dataset& ds) {
    return with_intercept(ds, false, false, true, false);
}

Eigen::MatrixXd design_exposure_covariates(const Dataset& ds) {
    return with_intercept(ds, true, false, true, false);
}

Eigen::MatrixXd design_mediators_covariates(const Dataset& ds) {
    return with_intercept(ds, false, true, true, false);
}

Eigen::MatrixXd design_full(const Dataset& ds, bool interaction) {
    return with_intercept(ds, true, true, true, interaction);
}

Eigen::VectorXd outcome_vector(const Dataset& ds) {
    return Eigen::Map<const Eigen::VectorXd>(ds.outcome().data(),
                                             static_cast<Eigen::Index>(ds.n_rows()));
}

Eigen::VectorXd exposure_vector(const Dataset& ds) {
    return Eigen::Map<const Eigen::VectorXd>(ds.exposure().data(),
                                             static_cast<Eigen::Index>(ds.n_rows()));
}

void check_config(Method method, const Dataset& ds, const EstimatorConfig& cfg) {
    const MethodCapabilities caps = capabilities(method);
    if (cfg.include_interaction && !caps.interaction_supported)
        throw UsageError("method '" + to_string(method) +
                         "' does not permit a mediator-mediator interaction term");
    if (cfg.include_interaction && ds.n_mediators() != 2)
        throw UsageError("interaction term requires exactly two mediators");
    if (caps.requires_two_mediators && ds.n_mediators() != 2)
        throw UsageError("method '" + to_string(method) + "' requires exactly two mediators");
    if (ds.n_mediators() == 0) throw UsageError("dataset has no mediators");
    if (cfg.n_imputation_draws < 1) throw UsageError("n_imputation_draws must be >= 1");
    if (cfg.n_quasibayes_draws < 1) throw UsageError("n_quasibayes_draws must be >= 1");
    if (!(cfg.weight_truncation_quantile > 0.5 && cfg.weight_truncation_quantile <= 1.0))
        throw UsageError("weight_truncation_quantile must lie in (0.5, 1]");
}

void check_arms_nonempty(const Dataset& ds) {
    bool has0 = false, has1 = false;
    for (double v : ds.exposure()) (v == 0.0 ? has0 : has1) = true;
    if (!has0 || !has1) throw FitError("an exposure arm is empty");
}

MvnSampler::MvnSampler(Eigen::VectorXd mean, const Eigen::MatrixXd& cov)
    : mean_(std::move(mean)) {
    const Eigen::Index p = mean_.size();
    if (cov.rows() != p || cov.cols() != p)
        throw UsageError("MvnSampler: covariance dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    transform_ = es.eigenvectors() * roots.asDiagonal();
}

Eigen::VectorXd MvnSampler::draw(Rng& rng) const {
    Eigen::VectorXd z(mean_.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
    return mean_ + transform_ * z;
}

}  // namespace detail

Eigen::VectorXd mvn_draw(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov, Rng& rng) {
    return detail::MvnSampler(mean, cov).draw(rng);
}

EffectEstimates estimate_difference(const Dataset& raw, const EstimatorConfig& cfg) {
    detail::check_config(Method::Difference, raw, cfg);
    const Dataset ds = detail::canonical_copy(raw);
    detail::check_arms_nonempty(ds);
    const Eigen::VectorXd y = detail::outcome_vector(ds);
    const glm::GlmFit total =
        glm::fit(glm::Family::ModifiedPoisson, detail::design_exposure_covariates(ds), y);
    const glm::GlmFit direct =
        glm::fit(glm::Family::ModifiedPoisson, detail::design_full(ds, false), y);
    const double phi1 = total.coefficients[1];
    const double theta1 = direct.coefficients[1];
    EffectEstimates out;
    out.method = Method::Difference;
    out.te = std::exp(phi1);
    out.de = std::exp(theta1);
    out.ie = std::exp(phi1 - theta1);
    return out;
}

EffectEstimates estimate_weighting(const Dataset& raw, const EstimatorConfig& cfg) {
    detail::check_config(Method::Weighting, raw, cfg);
    const Dataset ds = detail::canonical_copy(raw);
    detail::check_arms_nonempty(ds);
    const std::size_t n = ds.n_rows();
    const Eigen::VectorXd x = detail::exposure_vector(ds);
    const Eigen::VectorXd y = detail::outcome_vector(ds);

    const Eigen::MatrixXd Xc = detail::design_covariates(ds);
    const glm::GlmFit exposure_fit = glm::fit(glm::Family::Logistic, Xc, x);
    const Eigen::VectorXd lp = Xc * exposure_fit.coefficients;
    const double p_marginal = x.mean();

    // Stabilized weights P(X=x) / P(X=x | C), with a positivity guard on
    // each subject's own-arm probability.
    Eigen::VectorXd w(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double p1 = expit(lp[static_cast<Eigen::Index>(i)]);
        const double p_own = ds.exposure()[i] == 1.0 ? p1 : 1.0 - p1;
        if (p_own < 1e-6) throw FitError("positivity violation");
        w[static_cast<Eigen::Index>(i)] =
            ds.exposure()[i] == 1.0 ? p_marginal / p1 : (1.0 - p_marginal) / (1.0 - p1);
    }

    double num11 = 0.0, den11 = 0.0, num00 = 0.0, den00 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto j = static_cast<Eigen::Index>(i);
        if (ds.exposure()[i] == 1.0) {
            num11 += w[j] * y[j];
            den11 += w[j];
        } else {
            num00 += w[j] * y[j];
            den00 += w[j];
        }
    }
    const double m11 = num11 / den11;
    const double m00 = num00 / den00;

    const Eigen::MatrixXd Xfull = detail::design_full(ds, cfg.include_interaction);
    const glm::GlmFit outcome_fit = glm::fit(glm::Family::ModifiedPoisson, Xfull, y);
    // Impute E[Y(1, M(0,0))]: predictions at X=1 on the unexposed rows
    // (their observed mediators and covariates), arm-0 weighted.
    double num10 = 0.0, den10 = 0.0;
    Eigen::VectorXd row(Xfull.cols());
    for (std::size_t i = 0; i < n; ++i) {
        if (ds.exposure()[i] != 0.0) continue;
        const auto j = static_cast<Eigen::Index>(i);
        row = Xfull.row(j);
        row[1] = 1.0;  // set exposure; mediator and interaction columns stay observed
        num10 += w[j] * glm::predict(outcome_fit, row, glm::PredictType::Mean);
        den10 += w[j];
    }
    const double m10 = num10 / den10;

    EffectEstimates out;
    out.method = Method::Weighting;
    out.te = m11 / m00;
    out.de = m10 / m00;
    out.ie = m11 / m10;
    return out;
}

EffectEstimates estimate_iorw(const Dataset& raw, const EstimatorConfig& cfg) {
    detail::check_config(Method::IORW, raw, cfg);
    const Dataset ds = detail::canonical_copy(raw);
    detail::check_arms_nonempty(ds);
    const std::size_t n = ds.n_rows();
    const std::size_t n_med = ds.n_mediators();
    const Eigen::VectorXd x = detail::exposure_vector(ds);
    const Eigen::VectorXd y = detail::outcome_vector(ds);

    const glm::GlmFit or_fit =
        glm::fit(glm::Family::Logistic, detail::design_mediators_covariates(ds), x);

    // Inverse of the mediator-driven odds factor for exposed subjects.
    std::vector<double> exposed_weights;
    std::vector<std::size_t> exposed_rows;
    for (std::size_t i = 0; i < n; ++i) {
        if (ds.exposure()[i] != 1.0) continue;
        double sum = 0.0;
        for (std::size_t k = 0; k < n_med; ++k)
            sum += or_fit.coefficients[1 + static_cast<Eigen::Index>(k)] * ds.mediator(k)[i];
        exposed_rows.push_back(i);
        exposed_weights.push_back(std::exp(-sum));
    }
    Eigen::VectorXd w = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
    std::size_t n_capped = 0;
    const double cap = quantile_type7(exposed_weights, cfg.weight_truncation_quantile);
    for (std::size_t e = 0; e < exposed_rows.size(); ++e) {
        double wi = exposed_weights[e];
        if (wi > cap) {
            wi = cap;
            ++n_capped;
        }
        w[static_cast<Eigen::Index>(exposed_rows[e])] = wi;
    }
    if (!exposed_rows.empty() && n_capped == exposed_rows.size())
        throw FitError("degenerate IORW weights");

    const Eigen::MatrixXd Xxc = detail::design_exposure_covariates(ds);
    const glm::GlmFit total_fit = glm::fit(glm::Family::ModifiedPoisson, Xxc, y);
    const glm::GlmFit direct_fit = glm::fit(glm::Family::ModifiedPoisson, Xxc, y, w);

    EffectEstimates out;
    out.method = Method::IORW;
    out.te = std::exp(total_fit.coefficients[1]);
    out.de = std::exp(direct_fit.coefficients[1]);
    out.ie = out.te / out.de;
    return out;
}

EffectEstimates estimate(Method method, const Dataset& ds, const EstimatorConfig& cfg) {
    EstimatorConfig c = cfg;
    c.method = method;
    switch (method) {
        case Method::Difference: return estimate_difference(ds, c);
        case Method::Regression: return estimate_regression(ds, c);
        case Method::Weighting: return estimate_weighting(ds, c);
        case Method::IORW: return estimate_iorw(ds, c);
        case Method::Wang: return estimate_wang(ds, c);
        case Method::Jerolon: return estimate_jerolon(ds, c);
    }
    throw UsageError("unknown method");
}

}  // namespace medmediate
