// Keyed RNG streams, normal kernels, and descriptive-statistics helpers.
#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "medmediate/normal.hpp"
#include "medmediate/rng.hpp"
#include "medmediate/stats.hpp"

using namespace medmediate;

TEST_CASE("rng streams are pure functions of their key", "[rng_stats]") {
    Rng a(42), b(42), c(43);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t va = a.next_u64(), vb = b.next_u64(), vc = c.next_u64();
        all_equal = all_equal && (va == vb);
        any_diff = any_diff || (va != vc);
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("derive_key chains tags hierarchically", "[rng_stats]") {
    CHECK(derive_key(1, 2, 3) == derive_key(derive_key(1, 2), 3));
    CHECK(derive_key(1, 2, 3, 4) == derive_key(derive_key(derive_key(1, 2), 3), 4));
    CHECK(derive_key(1, 2) != derive_key(2, 1));
    CHECK(derive_key(1, 2, 3) != derive_key(1, 3, 2));
}

TEST_CASE("uniform01 stays strictly inside (0,1)", "[rng_stats]") {
    Rng rng(7);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 200000; ++i) {
        const double u = rng.uniform01();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
    CHECK(lo < 0.001);  // the stream actually explores the range
    CHECK(hi > 0.999);
}

TEST_CASE("uniform_below covers [0,n) uniformly", "[rng_stats]") {
    Rng rng(11);
    std::vector<int> counts(10, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) ++counts[rng.uniform_below(10)];
    for (int k = 0; k < 10; ++k) {
        CHECK(counts[k] > draws / 10 - 600);
        CHECK(counts[k] < draws / 10 + 600);
    }
}

TEST_CASE("norm_quantile inverts norm_cdf", "[rng_stats]") {
    for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.7, 0.99, 1.0 - 1e-6}) {
        CHECK(std::abs(norm_cdf(norm_quantile(p)) - p) < 1e-12 * std::max(1.0, 1.0 / p));
    }
    CHECK(norm_quantile(0.5) == 0.0);
    CHECK(norm_quantile(0.0) == -std::numeric_limits<double>::infinity());
    CHECK(norm_quantile(1.0) == std::numeric_limits<double>::infinity());
    // Classic reference quantile: z_{0.975}.
    CHECK(std::abs(norm_quantile(0.975) - 1.959963984540054) < 1e-12);
}

TEST_CASE("rng normal draws have standard moments", "[rng_stats]") {
    Rng rng(13);
    const int n = 200000;
    std::vector<double> z(n);
    for (auto& v : z) v = rng.normal();
    CHECK(std::abs(mean(z)) < 0.01);
    CHECK(std::abs(sample_sd(z) - 1.0) < 0.01);
}

TEST_CASE("expit is the standard logistic function", "[rng_stats]") {
    CHECK(expit(0.0) == 0.5);
    CHECK(std::abs(expit(2.0) - 1.0 / (1.0 + std::exp(-2.0))) < 1e-15);
    CHECK(std::abs(expit(-700.0)) < 1e-300);  // no underflow to garbage
    CHECK(expit(700.0) == 1.0);
    CHECK(std::abs(expit(3.0) + expit(-3.0) - 1.0) < 1e-15);
}

TEST_CASE("descriptive statistics match hand values", "[rng_stats]") {
    std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    CHECK(mean(v) == 2.5);
    CHECK(std::abs(sample_sd(v) - std::sqrt(5.0 / 3.0)) < 1e-15);
    CHECK(median(v) == 2.5);
    CHECK(median({1.0, 2.0, 100.0}) == 2.0);
    CHECK(quantile_type7({0.0, 10.0}, 0.25) == 2.5);

    std::vector<double> a{1, 2, 3, 4, 5}, b{2, 4, 6, 8, 10};
    CHECK(std::abs(pearson_correlation(a, b) - 1.0) < 1e-12);
    std::vector<double> br{10, 8, 6, 4, 2};
    CHECK(std::abs(pearson_correlation(a, br) + 1.0) < 1e-12);
}
