#include "medmediate/scenario.hpp"

#include <cmath>
#include <string>

#include "medmediate/errors.hpp"
#include "medmediate/normal.hpp"
#include "medmediate/rng.hpp"

namespace medmediate {

ScenarioSpec scenario_spec(int id) {
    if (id < 1 || id > 16) throw UsageError("unknown scenario " + std::to_string(id) +
                                            " (valid ids are 1..16)");
    ScenarioSpec spec;
    spec.id = id;
    if (id <= 12) {
        const int block = (id - 1) / 3;       // 0..3 -> rho
        const int kind_slot = (id - 1) % 3;   // 0: cont/cont, 1: bin/bin, 2: bin/cont
        spec.rho = 0.25 * block;
        if (kind_slot == 0) {
            spec.kind1 = MediatorKind::Continuous;
            spec.kind2 = MediatorKind::Continuous;
        } else if (kind_slot == 1) {
            spec.kind1 = MediatorKind::Binary;
            spec.kind2 = MediatorKind::Binary;
        } else {
            spec.kind1 = MediatorKind::Binary;
            spec.kind2 = MediatorKind::Continuous;
        }
    } else {
        spec.kind1 = MediatorKind::Continuous;
        spec.kind2 = MediatorKind::Continuous;
        spec.rho = 0.25 * (id - 13);
        spec.interaction = true;
        spec.beta_interaction = 0.2;
    }
    return spec;
}

double mediator_linear_predictor(const ScenarioSpec& spec, int which, double x, double c) {
    if (which == 1) return spec.m1_intercept + spec.m1_coef_x * x + spec.m1_coef_c * c;
    if (which == 2) return spec.m2_intercept + spec.m2_coef_x * x + spec.m2_coef_c * c;
    throw UsageError("mediator index must be 1 or 2");
}

double mediator_value(const ScenarioSpec& spec, int which, double x, double c, double eps) {
    const double lp = mediator_linear_predictor(spec, which, x, c) + eps;
    const MediatorKind kind = which == 1 ? spec.kind1 : spec.kind2;
    return kind == MediatorKind::Binary ? (lp > 0.0 ? 1.0 : 0.0) : lp;
}

Dataset generate_dataset(const ScenarioSpec& spec, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> y(n), x(n), m1(n), m2(n), c(n);
    const double rho_coupling = std::sqrt(1.0 - spec.rho * spec.rho);
    for (std::size_t i = 0; i < n; ++i) {
        const double ci = rng.bernoulli(0.5) ? 1.0 : 0.0;
        const double px = expit(spec.exposure_intercept + spec.exposure_coef_c * ci);
        const double xi = rng.bernoulli(px) ? 1.0 : 0.0;
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        const double eps1 = spec.sigma1 * z1;
        const double eps2 = spec.sigma2 * (spec.rho * z1 + rho_coupling * z2);
        const double m1i = mediator_value(spec, 1, xi, ci, eps1);
        const double m2i = mediator_value(spec, 2, xi, ci, eps2);
        const double logit_y = spec.beta0 + spec.beta_x * xi + spec.beta_m1 * m1i +
                               spec.beta_m2 * m2i + spec.beta_interaction * m1i * m2i +
                               spec.beta_c * ci;
        const double yi = rng.bernoulli(expit(logit_y)) ? 1.0 : 0.0;
        c[i] = ci;
        x[i] = xi;
        m1[i] = m1i;
        m2[i] = m2i;
        y[i] = yi;
    }
    Schema schema{"y", "x", {{"m1", spec.kind1}, {"m2", spec.kind2}}, {"c"}};
    return Dataset(std::move(schema),
                   {std::move(y), std::move(x), std::move(m1), std::move(m2), std::move(c)});
}

}  // namespace medmediate
