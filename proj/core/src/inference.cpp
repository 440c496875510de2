#include "medmediate/inference.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "medmediate/errors.hpp"
#include "medmediate/estimators.hpp"
#include "medmediate/parallel.hpp"
#include "medmediate/rng.hpp"

namespace medmediate {

IntervalEstimate percentile_interval(std::vector<double> draws, double level) {
    if (draws.empty()) throw UsageError("percentile_interval: no draws");
    if (!(level > 0.0 && level < 1.0))
        throw UsageError("percentile_interval: level must lie in (0, 1)");
    std::sort(draws.begin(), draws.end());
    const double alpha = 1.0 - level;
    const auto b = static_cast<double>(draws.size());
    auto clamp_rank = [&](double r) {
        return std::min(draws.size(), static_cast<std::size_t>(std::max(1.0, r)));
    };
    const std::size_t lo = clamp_rank(std::floor(alpha / 2.0 * (b + 1.0)));
    const std::size_t hi = clamp_rank(std::ceil((1.0 - alpha / 2.0) * (b + 1.0)));
    return IntervalEstimate{draws[lo - 1], draws[hi - 1], level};
}

BootstrapResult bootstrap_ci(const Dataset& ds, const EstimatorFn& estimator,
                             const EstimatorConfig& cfg, const BootstrapPlan& plan) {
    if (!(plan.level > 0.0 && plan.level < 1.0))
        throw UsageError("bootstrap_ci: level must lie in (0, 1)");
    const double alpha = 1.0 - plan.level;
    if (static_cast<double>(plan.n_resamples) < 2.0 / alpha)
        throw UsageError("bootstrap_ci: n_resamples too small for the requested level "
                         "(need at least 2/alpha)");

    BootstrapResult result;
    result.estimates = estimator(ds, cfg);  // estimator failure on full data propagates

    const std::size_t n = ds.n_rows();
    const std::size_t B = plan.n_resamples;
    std::vector<std::optional<EffectEstimates>> slots(B);
    parallel_for(B, [&](std::size_t b) {
        Rng rng(derive_key(plan.seed, 0xB0075u, b));
        std::vector<std::size_t> rows(n);
        for (std::size_t i = 0; i < n; ++i) rows[i] = rng.uniform_below(n);
        EstimatorConfig sub_cfg = cfg;
        sub_cfg.rng_seed = derive_key(cfg.rng_seed, 0xB0075u, b);
        try {
            slots[b] = estimator(ds.subset(rows), sub_cfg);
        } catch (const FitError&) {
            slots[b] = std::nullopt;
        } catch (const IntegrationError&) {
            slots[b] = std::nullopt;
        }
    });

    std::vector<double> te, de, ie, ie1, ie2;
    for (const auto& slot : slots) {
        if (!slot) {
            ++result.n_failed;
            continue;
        }
        te.push_back(slot->te);
        de.push_back(slot->de);
        ie.push_back(slot->ie);
        if (slot->ie1) ie1.push_back(*slot->ie1);
        if (slot->ie2) ie2.push_back(*slot->ie2);
    }
    result.n_resamples_used = te.size();
    if (static_cast<double>(result.n_failed) > 0.1 * static_cast<double>(B))
        throw FitError("bootstrap: " + std::to_string(result.n_failed) + " of " +
                       std::to_string(B) + " resamples failed (over the 10% cap)");

    result.estimates.te_interval = percentile_interval(te, plan.level);
    result.estimates.de_interval = percentile_interval(de, plan.level);
    result.estimates.ie_interval = percentile_interval(ie, plan.level);
    if (result.estimates.ie1 && ie1.size() == result.n_resamples_used)
        result.estimates.ie1_interval = percentile_interval(ie1, plan.level);
    if (result.estimates.ie2 && ie2.size() == result.n_resamples_used)
        result.estimates.ie2_interval = percentile_interval(ie2, plan.level);
    return result;
}

BootstrapResult bootstrap_ci(const Dataset& ds, Method method, const EstimatorConfig& cfg,
                             const BootstrapPlan& plan) {
    if (method == Method::Jerolon)
        throw UsageError("bootstrap_ci: Jerolon provides quasi-Bayesian intervals, "
                         "not bootstrap intervals");
    return bootstrap_ci(
        ds,
        [method](const Dataset& d, const EstimatorConfig& c) { return estimate(method, d, c); },
        cfg, plan);
}

}  // namespace medmediate
