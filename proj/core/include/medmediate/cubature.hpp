// Adaptive numerical integration: Gauss-Kronrod 7-15 in one dimension,
// the Genz-Malik embedded degree-7/5 rule in two. Both subdivide the
// current worst region first and are fully deterministic.
#pragma once

#include <array>
#include <cstddef>
#include <functional>

namespace medmediate {

struct IntegrationResult {
    double value = 0.0;
    double abs_error = 0.0;       // estimated
    std::size_t n_evaluations = 0;
};

struct IntegrationOptions {
    double rel_tol = 1e-7;
    double abs_tol = 0.0;          // secondary absolute target; 0 disables
    std::size_t max_regions = 20000;
};

/// Integrates f over [a, b]. Throws IntegrationError (carrying the achieved
/// error estimate) if the tolerance cannot be met within the region budget.
IntegrationResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                               const IntegrationOptions& opts = {});

/// Integrates f over the axis-aligned rectangle [lo[0],hi[0]] x [lo[1],hi[1]].
IntegrationResult integrate_2d(const std::function<double(double, double)>& f,
                               std::array<double, 2> lo, std::array<double, 2> hi,
                               const IntegrationOptions& opts = {});

}  // namespace medmediate
