#include "medmediate/glm.hpp"

#include <cmath>
#include <string>

#include "medmediate/errors.hpp"
#include "medmediate/normal.hpp"

namespace medmediate::glm {

namespace {

double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

// Column scales for the standardized-predictor view used by the score
// convergence test and the separation guard. Columns with (near-)zero
// spread, the intercept included, get scale 1.
Eigen::VectorXd column_scales(const Eigen::MatrixXd& X) {
    const auto n = static_cast<double>(X.rows());
    Eigen::VectorXd scales(X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double mean = X.col(j).mean();
        const double var = (X.col(j).array() - mean).square().sum() / (n - 1.0);
        scales[j] = var > 1e-24 ? std::sqrt(var) : 1.0;
    }
    return scales;
}

struct IterationState {
    Eigen::VectorXd score_factor;  // per-observation d loglik / d eta, prior weight included
    Eigen::VectorXd curvature;     // per-observation negative second derivative wrt eta
    double deviance = 0.0;
};

// Per-family evaluation of score, curvature, and deviance at a linear predictor.
IterationState evaluate(Family family, const Eigen::VectorXd& eta, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& w) {
    const Eigen::Index n = eta.size();
    IterationState st;
    st.score_factor.resize(n);
    st.curvature.resize(n);
    double dev = 0.0;
    switch (family) {
        case Family::Logistic:
            for (Eigen::Index i = 0; i < n; ++i) {
                const double mu = expit(eta[i]);
                st.score_factor[i] = w[i] * (y[i] - mu);
                st.curvature[i] = std::max(w[i] * mu * (1.0 - mu), 1e-300);
                dev -= 2.0 * w[i] * (xlogy(y[i], mu) + xlogy(1.0 - y[i], 1.0 - mu));
            }
            break;
        case Family::Probit:
            for (Eigen::Index i = 0; i < n; ++i) {
                const double F = norm_cdf(eta[i]);
                const double f = norm_pdf(eta[i]);
                // Exact per-observation negative second derivative: for y=1
                // it is r1(r1+eta) with r1 = f/F, for y=0 it is r0(r0-eta)
                // with r0 = f/(1-F); both positive, so Newton = IRLS here.
                const double r1 = f / std::max(F, 1e-300);
                const double r0 = f / std::max(1.0 - F, 1e-300);
                st.score_factor[i] = w[i] * (y[i] * r1 - (1.0 - y[i]) * r0);
                st.curvature[i] =
                    w[i] * (y[i] * r1 * (r1 + eta[i]) + (1.0 - y[i]) * r0 * (r0 - eta[i]));
                st.curvature[i] = std::max(st.curvature[i], 1e-300);
                dev -= 2.0 * w[i] * (xlogy(y[i], F) + xlogy(1.0 - y[i], 1.0 - F));
            }
            break;
        case Family::ModifiedPoisson:
            for (Eigen::Index i = 0; i < n; ++i) {
                const double mu = std::exp(eta[i]);
                st.score_factor[i] = w[i] * (y[i] - mu);
                st.curvature[i] = std::max(w[i] * mu, 1e-300);
                dev += 2.0 * w[i] * (xlogy(y[i], y[i] / mu) - (y[i] - mu));
            }
            break;
        case Family::Linear:
            for (Eigen::Index i = 0; i < n; ++i) {
                const double r = y[i] - eta[i];
                st.score_factor[i] = w[i] * r;
                st.curvature[i] = w[i];
                dev += w[i] * r * r;
            }
            break;
    }
    st.deviance = dev;
    return st;
}

Eigen::MatrixXd weighted_cross(const Eigen::MatrixXd& X, const Eigen::VectorXd& d) {
    return X.transpose() * d.asDiagonal() * X;
}

}  // namespace

GlmFit fit(Family family, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
           const Eigen::VectorXd& weights, const Options& opts) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (y.size() != n) throw UsageError("glm: response length does not match design rows");
    if (n <= p)
        throw FitError("glm: need more observations than parameters (n=" + std::to_string(n) +
                       ", p=" + std::to_string(p) + ")");
    Eigen::VectorXd w = weights.size() == 0 ? Eigen::VectorXd::Ones(n) : weights;
    if (w.size() != n) throw UsageError("glm: weight length does not match design rows");
    if ((w.array() <= 0.0).any()) throw UsageError("glm: weights must be positive");
    bool y_is_binary = family != Family::Linear;
    if (family != Family::Linear) {
        const bool binary_required = family != Family::ModifiedPoisson;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (binary_required && y[i] != 0.0 && y[i] != 1.0)
                throw UsageError("glm: response must be coded 0/1 for this family");
            if (!binary_required && (y[i] < 0.0 || !std::isfinite(y[i])))
                throw UsageError("glm: response must be nonnegative for ModifiedPoisson");
            if (y[i] != 0.0 && y[i] != 1.0) y_is_binary = false;
        }
    }

    {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(X);
        const auto& sv = svd.singularValues();
        if (sv[p - 1] <= opts.rank_tol * sv[0])
            throw FitError("glm: design matrix is rank deficient");
    }

    const Eigen::VectorXd scales = column_scales(X);
    GlmFit out;
    out.family = family;
    out.n_obs = static_cast<std::size_t>(n);

    if (family == Family::Linear) {
        const Eigen::MatrixXd A = weighted_cross(X, w);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
        out.coefficients = ldlt.solve(X.transpose() * (w.asDiagonal() * y));
        const Eigen::VectorXd resid = y - X * out.coefficients;
        const double rss = (w.array() * resid.array().square()).sum();
        const double sigma2 = rss / static_cast<double>(n - p);
        out.residual_sd = std::sqrt(sigma2);
        out.deviance = rss;
        const Eigen::MatrixXd Ainv = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
        out.covariance_model = sigma2 * Ainv;
        const Eigen::VectorXd meat = (w.array() * resid.array()).square();
        out.covariance_robust = Ainv * weighted_cross(X, meat) * Ainv;
        out.converged = true;
        out.iterations = 1;
        return out;
    }

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    if (family == Family::ModifiedPoisson) {
        const double ybar = (w.array() * y.array()).sum() / w.sum();
        beta[0] = std::log(std::max(ybar, 1e-8));
    }

    Eigen::VectorXd eta = X * beta;
    IterationState st = evaluate(family, eta, y, w);
    bool converged = false;
    int iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        const Eigen::VectorXd score = X.transpose() * st.score_factor;
        const double score_std = (score.array() / scales.array()).abs().maxCoeff();
        if (score_std < opts.score_tol) {
            converged = true;
            break;
        }
        const Eigen::MatrixXd H = weighted_cross(X, st.curvature);
        const Eigen::VectorXd delta = Eigen::LDLT<Eigen::MatrixXd>(H).solve(score);
        double step = 1.0;
        Eigen::VectorXd beta_new;
        IterationState st_new;
        bool improved = false;
        for (int half = 0; half < 40; ++half) {
            beta_new = beta + step * delta;
            st_new = evaluate(family, X * beta_new, y, w);
            if (std::isfinite(st_new.deviance) &&
                st_new.deviance <= st.deviance * (1.0 + 1e-13) + 1e-13) {
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) {
            // No descent direction progress left: either we are at the
            // optimum to rounding (score test handles that next pass) or
            // the problem is pathological.
            beta_new = beta;
            st_new = st;
        }
        const double dev_change = std::abs(st.deviance - st_new.deviance);
        beta = beta_new;
        st = st_new;
        if ((beta.array() * scales.array()).abs().maxCoeff() > opts.separation_threshold)
            throw FitError("glm: separation detected (coefficient diverging)");
        if (dev_change < opts.deviance_tol * (std::abs(st.deviance) + 1e-10)) {
            converged = true;
            ++iter;
            break;
        }
    }
    if (!converged) throw FitError("glm: no convergence after " +
                                   std::to_string(opts.max_iterations) + " iterations");
    // A (near-)zero deviance on a 0/1 response means every observation is
    // fitted exactly: complete separation. The MLE does not exist there and
    // the stalled coefficients are arbitrary, so it is a hard error even
    // when no single coefficient has crossed the divergence threshold.
    // Separated stalls land around 1e-8 independent of n; legitimate fits
    // sit orders of magnitude above 1e-6.
    if (y_is_binary && st.deviance < 1e-6)
        throw FitError("glm: separation detected (perfect fit on a binary response)");

    out.coefficients = beta;
    out.converged = true;
    out.iterations = iter;
    out.deviance = st.deviance;

    const Eigen::MatrixXd A = weighted_cross(X, st.curvature);
    const Eigen::MatrixXd Ainv =
        Eigen::LDLT<Eigen::MatrixXd>(A).solve(Eigen::MatrixXd::Identity(p, p));
    out.covariance_model = 0.5 * (Ainv + Ainv.transpose());
    // Sandwich meat: per-observation scores with prior weights applied once
    // already in score_factor, squared overall = w_i^2 s_i^2.
    const Eigen::VectorXd meat = st.score_factor.array().square();
    Eigen::MatrixXd robust = Ainv * weighted_cross(X, meat) * Ainv;
    out.covariance_robust = 0.5 * (robust + robust.transpose());
    return out;
}

double predict(const GlmFit& fit, const Eigen::Ref<const Eigen::VectorXd>& design_row,
               PredictType type) {
    if (design_row.size() != fit.coefficients.size())
        throw UsageError("glm: predict row length does not match coefficient count");
    const double eta = design_row.dot(fit.coefficients);
    if (type == PredictType::LinearPredictor) return eta;
    switch (fit.family) {
        case Family::Logistic: return expit(eta);
        case Family::Probit: return norm_cdf(eta);
        case Family::Linear: return eta;
        case Family::ModifiedPoisson: return std::exp(eta);
    }
    return eta;
}

}  // namespace medmediate::glm
