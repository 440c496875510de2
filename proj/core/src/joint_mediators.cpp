#include "medmediate/joint_mediators.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "medmediate/errors.hpp"
#include "medmediate/normal.hpp"
#include "medmediate/stats.hpp"

namespace medmediate {

namespace {

constexpr double kRhoLimit = 0.999;  // |rho| at or beyond this is degenerate

Eigen::MatrixXd mediator_design(const Dataset& ds) {
    const auto n = static_cast<Eigen::Index>(ds.n_rows());
    const auto ncov = static_cast<Eigen::Index>(ds.n_covariates());
    Eigen::MatrixXd X(n, 2 + ncov);
    X.col(0).setOnes();
    for (Eigen::Index i = 0; i < n; ++i) X(i, 1) = ds.exposure()[i];
    for (Eigen::Index j = 0; j < ncov; ++j)
        for (Eigen::Index i = 0; i < n; ++i)
            X(i, 2 + j) = ds.covariate(static_cast<std::size_t>(j))[i];
    return X;
}

// Maximizes a smooth unimodal function on [lo, hi] by golden-section
// search; enough accuracy for the profile likelihood in rho.
double golden_maximize(const std::function<double(double)>& f, double lo, double hi) {
    constexpr double kInvPhi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int it = 0; it < 200 && (b - a) > 1e-10; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

// Coarse grid scan to bracket the maximizer, then golden-section inside
// the bracketing cell; robust even if the profile has shallow shoulders.
double maximize_rho(const std::function<double(double)>& ll) {
    constexpr int kGrid = 41;
    const double step = 2.0 * kRhoLimit / (kGrid - 1);
    double best_r = 0.0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (int g = 0; g < kGrid; ++g) {
        const double r = -kRhoLimit + step * g;
        const double v = ll(r);
        if (v > best_v) {
            best_v = v;
            best_r = r;
        }
    }
    const double lo = std::max(-kRhoLimit, best_r - step);
    const double hi = std::min(kRhoLimit, best_r + step);
    return golden_maximize(ll, lo, hi);
}

double safe_log(double p) { return std::log(std::max(p, 1e-300)); }

// Profile log-likelihood of rho for a binary mediator given a continuous
// one, marginals held fixed: P(M_b = 1 | z) = Phi((lp_b + rho z)/sqrt(1-rho^2))
// with z the standardized continuous residual.
double mixed_loglik(double rho, const Eigen::VectorXd& lp_bin, const Eigen::VectorXd& m_bin,
                    const Eigen::VectorXd& z_cont) {
    const double scale = 1.0 / std::sqrt(1.0 - rho * rho);
    double ll = 0.0;
    for (Eigen::Index i = 0; i < m_bin.size(); ++i) {
        const double p = norm_cdf((lp_bin[i] + rho * z_cont[i]) * scale);
        ll += m_bin[i] == 1.0 ? safe_log(p) : safe_log(1.0 - p);
    }
    return ll;
}

// Pairwise log-likelihood of rho for two binary mediators through
// bivariate probit orthant probabilities, marginals held fixed.
double binary_pair_loglik(double rho, const Eigen::VectorXd& lp1, const Eigen::VectorXd& lp2,
                          const Eigen::VectorXd& m1, const Eigen::VectorXd& m2) {
    double ll = 0.0;
    for (Eigen::Index i = 0; i < m1.size(); ++i) {
        const double p1 = norm_cdf(lp1[i]);
        const double p2 = norm_cdf(lp2[i]);
        const double both = bvn_cdf(lp1[i], lp2[i], rho);
        double p;
        if (m1[i] == 1.0 && m2[i] == 1.0) p = both;
        else if (m1[i] == 1.0) p = p1 - both;
        else if (m2[i] == 1.0) p = p2 - both;
        else p = 1.0 - p1 - p2 + both;
        ll += safe_log(p);
    }
    return ll;
}

}  // namespace

JointMediatorModel fit_joint(const Dataset& ds) {
    if (ds.n_mediators() != 2)
        throw UsageError("fit_joint: exactly two mediators required");
    const Eigen::MatrixXd X = mediator_design(ds);
    const auto n = static_cast<Eigen::Index>(ds.n_rows());

    JointMediatorModel model;
    model.kinds = {ds.mediator_kind(0), ds.mediator_kind(1)};

    Eigen::VectorXd m[2];
    for (int k = 0; k < 2; ++k) {
        m[k].resize(n);
        for (Eigen::Index i = 0; i < n; ++i)
            m[k][i] = ds.mediator(static_cast<std::size_t>(k))[static_cast<std::size_t>(i)];
    }

    const bool bin1 = model.kinds.first == MediatorKind::Binary;
    const bool bin2 = model.kinds.second == MediatorKind::Binary;
    model.marginal_1 = glm::fit(bin1 ? glm::Family::Probit : glm::Family::Linear, X, m[0]);
    model.marginal_2 = glm::fit(bin2 ? glm::Family::Probit : glm::Family::Linear, X, m[1]);
    model.sigma_1 = bin1 ? 1.0 : model.marginal_1.residual_sd;
    model.sigma_2 = bin2 ? 1.0 : model.marginal_2.residual_sd;

    const Eigen::VectorXd lp1 = X * model.marginal_1.coefficients;
    const Eigen::VectorXd lp2 = X * model.marginal_2.coefficients;

    double rho;
    if (!bin1 && !bin2) {
        const Eigen::VectorXd r1 = m[0] - lp1;
        const Eigen::VectorXd r2 = m[1] - lp2;
        std::vector<double> v1(r1.data(), r1.data() + n);
        std::vector<double> v2(r2.data(), r2.data() + n);
        rho = pearson_correlation(v1, v2);
    } else if (bin1 && bin2) {
        const auto ll = [&](double r) { return binary_pair_loglik(r, lp1, lp2, m[0], m[1]); };
        rho = maximize_rho(ll);
    } else {
        // One binary, one continuous: condition the binary on the
        // standardized continuous residual.
        const Eigen::VectorXd& lp_bin = bin1 ? lp1 : lp2;
        const Eigen::VectorXd& m_bin = bin1 ? m[0] : m[1];
        const double sigma_cont = bin1 ? model.sigma_2 : model.sigma_1;
        const Eigen::VectorXd z_cont =
            ((bin1 ? m[1] : m[0]) - (bin1 ? lp2 : lp1)) / sigma_cont;
        const auto ll = [&](double r) { return mixed_loglik(r, lp_bin, m_bin, z_cont); };
        rho = maximize_rho(ll);
    }

    if (!(std::abs(rho) < kRhoLimit))
        throw FitError("degenerate mediator correlation (|rho| >= 0.999)");
    model.rho = rho;
    return model;
}

std::pair<double, double> sample_counterfactual_pair(const JointMediatorModel& model,
                                                     double x1, double x2,
                                                     const std::vector<double>& covariate_row,
                                                     Rng& rng) {
    const Eigen::Index p = model.marginal_1.coefficients.size();
    if (static_cast<Eigen::Index>(covariate_row.size()) + 2 != p)
        throw UsageError("sample_counterfactual_pair: covariate row length mismatch");
    double lp1 = model.marginal_1.coefficients[0] + model.marginal_1.coefficients[1] * x1;
    double lp2 = model.marginal_2.coefficients[0] + model.marginal_2.coefficients[1] * x2;
    for (std::size_t j = 0; j < covariate_row.size(); ++j) {
        lp1 += model.marginal_1.coefficients[2 + static_cast<Eigen::Index>(j)] * covariate_row[j];
        lp2 += model.marginal_2.coefficients[2 + static_cast<Eigen::Index>(j)] * covariate_row[j];
    }
    const double z1 = rng.normal();
    const double z2 = rng.normal();
    const double eps1 = model.sigma_1 * z1;
    const double eps2 =
        model.sigma_2 * (model.rho * z1 + std::sqrt(1.0 - model.rho * model.rho) * z2);
    const double v1 = lp1 + eps1;
    const double v2 = lp2 + eps2;
    const double m1 = model.kinds.first == MediatorKind::Binary ? (v1 > 0.0 ? 1.0 : 0.0) : v1;
    const double m2 = model.kinds.second == MediatorKind::Binary ? (v2 > 0.0 ? 1.0 : 0.0) : v2;
    return {m1, m2};
}

}  // namespace medmediate
