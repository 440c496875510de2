// Effect containers shared by estimators, inference, and the truth oracle.
#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace medmediate {

enum class Method { Difference, Regression, Weighting, IORW, Wang, Jerolon };

std::string to_string(Method m);
std::optional<Method> method_from_string(const std::string& text);

/// What each method can and cannot do (the published capability matrix).
struct MethodCapabilities {
    bool path_specific = false;           // emits IE1/IE2 besides the joint IE
    bool interaction_supported = false;   // mediator-mediator product term permitted
    bool bootstrap_required = true;       // false only for quasi-Bayes intervals
    bool requires_two_mediators = false;  // bivariate joint mediator model
};

MethodCapabilities capabilities(Method m);

enum class IntervalSource { Bootstrap, QuasiBayes };

struct IntervalEstimate {
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.95;
    IntervalSource source = IntervalSource::Bootstrap;
};

/// All effects are risk ratios; 1.0 means no effect. Path-specific effects
/// (ie1, ie2) are populated only by the methods that can produce them.
struct EffectEstimates {
    static constexpr const char* scale = "RR";  // the only reporting scale

    Method method = Method::Difference;
    double te = 1.0;
    double de = 1.0;
    double ie = 1.0;
    std::optional<double> ie1;
    std::optional<double> ie2;

    std::optional<IntervalEstimate> te_interval;
    std::optional<IntervalEstimate> de_interval;
    std::optional<IntervalEstimate> ie_interval;
    std::optional<IntervalEstimate> ie1_interval;
    std::optional<IntervalEstimate> ie2_interval;
};

/// Settings common to all estimators. Fields irrelevant to a given method
/// are accepted and ignored; include_interaction is only legal for the
/// methods that permit a mediator-mediator product term (Weighting,
/// Jerolon).
struct EstimatorConfig {
    Method method = Method::Regression;
    bool include_interaction = false;          // M1*M2 term in the outcome model
    int n_imputation_draws = 1000;             // Regression (and accepted for Weighting)
    int n_quasibayes_draws = 1000;             // Jerolon
    double weight_truncation_quantile = 0.99;  // IORW upper truncation quantile
    std::uint64_t rng_seed = 0;                // any Monte Carlo inside the estimator
};

}  // namespace medmediate
