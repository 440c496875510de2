// Regression engine: logistic, probit, linear, and modified Poisson
// (log-link Poisson on a binary response with Huber-White sandwich
// variance, Zou 2004). All fits accept observation weights.
#pragma once

#include <Eigen/Dense>

namespace medmediate::glm {

enum class Family { Logistic, Probit, Linear, ModifiedPoisson };

enum class PredictType { LinearPredictor, Mean };

struct Options {
    int max_iterations = 100;
    double deviance_tol = 1e-10;       // relative deviance change
    double score_tol = 1e-8;           // max |score| on standardized-predictor scale
    double separation_threshold = 30;  // |coefficient| on standardized scale
    double rank_tol = 1e-10;           // smallest/largest singular value of design
};

struct GlmFit {
    Family family = Family::Linear;
    Eigen::VectorXd coefficients;       // intercept first (column order of the design)
    Eigen::MatrixXd covariance_model;   // inverse observed information (OLS formula for Linear)
    Eigen::MatrixXd covariance_robust;  // sandwich A^{-1} B A^{-1}
    bool converged = false;
    int iterations = 0;
    double deviance = 0.0;
    double residual_sd = 0.0;           // Linear only: sqrt(weighted RSS / (n - p))
    std::size_t n_obs = 0;
};

/// Fits by IRLS with step-halving (probit by Newton with the exact
/// Hessian; linear in closed form). The design must carry its own
/// intercept column. Throws FitError on rank deficiency, separation
/// (|coefficient| > separation_threshold on the standardized-predictor
/// scale, or a perfect fit of a 0/1 response), or non-convergence;
/// UsageError on malformed arguments.
GlmFit fit(Family family, const Eigen::MatrixXd& design, const Eigen::VectorXd& response,
           const Eigen::VectorXd& weights = Eigen::VectorXd(), const Options& opts = {});

/// Evaluates the fit on one design row. Mean applies the inverse link
/// (expit, standard normal CDF, identity, exp); exp-link means above 1
/// are returned as-is.
double predict(const GlmFit& fit, const Eigen::Ref<const Eigen::VectorXd>& design_row,
               PredictType type = PredictType::Mean);

}  // namespace medmediate::glm
