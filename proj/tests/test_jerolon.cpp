// Jerolon quasi-Bayes estimator: null behaviour, determinism, and the
// degenerate zero-covariance contract.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "estimators_internal.hpp"
#include "medmediate/errors.hpp"
#include "medmediate/estimators.hpp"
#include "medmediate/scenario.hpp"
#include "support/test_support.hpp"

using namespace medmediate;
using namespace medmediate::testsupport;

namespace {
constexpr std::uint64_t kSeed = 20260822ull;

EstimatorConfig jerolon_config(std::uint64_t seed, int draws) {
    EstimatorConfig cfg;
    cfg.method = Method::Jerolon;
    cfg.rng_seed = seed;
    cfg.n_quasibayes_draws = draws;
    return cfg;
}
}  // namespace

TEST_CASE("jerolon: null mediator-outcome path gives IE near 1 with covering interval",
          "[jerolon]") {
    ScenarioSpec spec = scenario_spec(1);
    spec.beta_m1 = 0.0;
    spec.beta_m2 = 0.0;
    const Dataset ds = generate_dataset(spec, 100000, derive_key(kSeed, 3ull));
    EffectEstimates e = estimate_jerolon(ds, jerolon_config(derive_key(kSeed, 0x1E1ull), 1000));
    CHECK(e.ie > 0.98);
    CHECK(e.ie < 1.02);
    REQUIRE(e.ie_interval.has_value());
    CHECK(e.ie_interval->lower < 1.0);
    CHECK(e.ie_interval->upper > 1.0);
}

TEST_CASE("jerolon: same seed gives bit-identical output", "[jerolon]") {
    const Dataset ds = generate_dataset(scenario_spec(2), 2000, derive_key(kSeed, 0x1E2ull));
    const EstimatorConfig cfg = jerolon_config(derive_key(kSeed, 0x1E3ull), 100);
    EffectEstimates a = estimate_jerolon(ds, cfg);
    EffectEstimates b = estimate_jerolon(ds, cfg);
    CHECK(a.te == b.te);
    CHECK(a.de == b.de);
    CHECK(a.ie == b.ie);
    REQUIRE(a.ie1.has_value());
    REQUIRE(b.ie1.has_value());
    CHECK(*a.ie1 == *b.ie1);
    CHECK(*a.ie2 == *b.ie2);
    REQUIRE(a.te_interval.has_value());
    CHECK(a.te_interval->lower == b.te_interval->lower);
    CHECK(a.te_interval->upper == b.te_interval->upper);
    CHECK(a.ie_interval->lower == b.ie_interval->lower);
    CHECK(a.ie_interval->upper == b.ie_interval->upper);
}

TEST_CASE("jerolon: decomposition holds exactly and intervals are quasi-Bayes", "[jerolon]") {
    const Dataset ds = generate_dataset(scenario_spec(11), 1500, derive_key(kSeed, 0x1E4ull));
    EffectEstimates e = estimate_jerolon(ds, jerolon_config(derive_key(kSeed, 0x1E5ull), 80));
    CHECK(e.te == e.de * e.ie);
    REQUIRE(e.te_interval.has_value());
    REQUIRE(e.de_interval.has_value());
    REQUIRE(e.ie_interval.has_value());
    REQUIRE(e.ie1_interval.has_value());
    REQUIRE(e.ie2_interval.has_value());
    CHECK(e.te_interval->source == IntervalSource::QuasiBayes);
    CHECK(e.de_interval->source == IntervalSource::QuasiBayes);
    CHECK(e.ie_interval->source == IntervalSource::QuasiBayes);
    CHECK(e.ie1_interval->source == IntervalSource::QuasiBayes);
    CHECK(e.ie2_interval->source == IntervalSource::QuasiBayes);
    CHECK(e.te_interval->level == 0.95);
}

TEST_CASE("jerolon: zero parameter covariance collapses every interval", "[jerolon]") {
    // With the quasi-posterior covariance scaled to zero every draw reuses
    // the point-estimate parameters, and because subjects' latent residual
    // streams are keyed independently of the draw index, all draws produce
    // identical effects: intervals of width zero at the point estimate.
    const Dataset ds = generate_dataset(scenario_spec(2), 1200, derive_key(kSeed, 0x1E6ull));
    EffectEstimates e = detail::jerolon_with_covariance_scale(
        ds, jerolon_config(derive_key(kSeed, 0x1E7ull), 50), 0.0);
    REQUIRE(e.te_interval.has_value());
    CHECK(e.te_interval->upper - e.te_interval->lower == 0.0);
    CHECK(e.te_interval->lower == e.te);
    CHECK(e.de_interval->upper - e.de_interval->lower == 0.0);
    CHECK(e.ie_interval->upper - e.ie_interval->lower == 0.0);
    CHECK(e.ie_interval->lower == e.ie);
    REQUIRE(e.ie1_interval.has_value());
    CHECK(e.ie1_interval->upper - e.ie1_interval->lower == 0.0);
    CHECK(e.ie2_interval->upper - e.ie2_interval->lower == 0.0);
}
