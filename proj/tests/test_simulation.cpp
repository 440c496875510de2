// Simulation harness: metric arithmetic, results import/export, and the
// determinism and truth-consistency contracts of run_scenario.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "medmediate/errors.hpp"
#include "medmediate/parallel.hpp"
#include "medmediate/simulation.hpp"
#include "support/test_support.hpp"

using namespace medmediate;
using namespace medmediate::testsupport;

namespace {
constexpr std::uint64_t kSeed = 20260822ull;

bool records_identical(const std::vector<MetricsRecord>& a, const std::vector<MetricsRecord>& b) {
    if (a.size() != b.size()) return false;
    auto same = [](double x, double y) {
        return (std::isnan(x) && std::isnan(y)) || x == y;
    };
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].scenario != b[i].scenario || a[i].method != b[i].method ||
            a[i].effect != b[i].effect || a[i].n_used != b[i].n_used)
            return false;
        if (!same(a[i].truth, b[i].truth) || !same(a[i].percent_bias, b[i].percent_bias) ||
            !same(a[i].mse, b[i].mse) || !same(a[i].coverage, b[i].coverage) ||
            !same(a[i].mean_width, b[i].mean_width))
            return false;
    }
    return true;
}

IntervalEstimate interval(double lo, double hi) {
    IntervalEstimate iv;
    iv.lower = lo;
    iv.upper = hi;
    return iv;
}
}  // namespace

TEST_CASE("summarize_effect computes bias and mse by the definitions", "[simulation]") {
    // Estimates {1.0, 1.2} against truth 1.1: mean error zero, squared
    // errors 0.01 each.
    MetricsRecord r =
        summarize_effect(1, Method::Weighting, "te", 1.1, {1.0, 1.2}, {});
    CHECK(std::abs(r.percent_bias) < 1e-10);
    CHECK(std::abs(r.mse - 0.01) < 1e-12);
    CHECK(r.n_used == 2);
    CHECK(std::isnan(r.coverage));
    CHECK(std::isnan(r.mean_width));
    CHECK(r.scenario == 1);
    CHECK(r.method == Method::Weighting);
    CHECK(r.effect == "te");
    CHECK(r.truth == 1.1);
}

TEST_CASE("summarize_effect counts interval coverage", "[simulation]") {
    std::vector<double> estimates;
    std::vector<IntervalEstimate> intervals;
    for (int i = 0; i < 200; ++i) {
        estimates.push_back(1.1);
        // 190 intervals contain the truth 1.1; the last 10 sit above it.
        intervals.push_back(i < 190 ? interval(1.0, 1.2) : interval(1.2, 1.3));
    }
    MetricsRecord r = summarize_effect(4, Method::IORW, "ie", 1.1, estimates, intervals);
    CHECK(r.coverage == 0.95);
    CHECK(std::abs(r.mean_width - (190 * 0.2 + 10 * 0.1) / 200.0) < 1e-12);
    CHECK(r.n_used == 200);
}

TEST_CASE("summarize_effect with no successes reports NaN metrics", "[simulation]") {
    MetricsRecord r = summarize_effect(2, Method::Wang, "ie1", 1.3, {}, {});
    CHECK(r.n_used == 0);
    CHECK(std::isnan(r.percent_bias));
    CHECK(std::isnan(r.mse));
    CHECK(std::isnan(r.coverage));
    CHECK(std::isnan(r.mean_width));
}

TEST_CASE("one record exports as a two-line CSV", "[simulation]") {
    TempDir tmp;
    MetricsRecord r = summarize_effect(3, Method::Difference, "de", 1.25, {1.2, 1.3}, {});
    const std::string path = tmp.file("one.csv");
    export_results({r}, path, ResultsFormat::Csv);
    const std::string text = read_file(path);
    std::size_t lines = 0;
    for (char ch : text)
        if (ch == '\n') ++lines;
    CHECK(lines == 2);
    CHECK(text.rfind("scenario,method,effect,truth,percent_bias,mse,coverage,mean_width,n_used\n",
                     0) == 0);
    CHECK(text.find("3,difference,de,") != std::string::npos);
}

TEST_CASE("an empty record list exports as a header-only CSV", "[simulation]") {
    TempDir tmp;
    const std::string path = tmp.file("empty.csv");
    export_results({}, path, ResultsFormat::Csv);
    CHECK(read_file(path) ==
          "scenario,method,effect,truth,percent_bias,mse,coverage,mean_width,n_used\n");
    CHECK(import_results(path).empty());
}

TEST_CASE("records round-trip through CSV and JSON, NaN included", "[simulation]") {
    TempDir tmp;
    std::vector<MetricsRecord> records;
    records.push_back(summarize_effect(1, Method::Weighting, "te", 1.1, {1.0, 1.2},
                                       {interval(0.9, 1.3), interval(1.15, 1.4)}));
    records.push_back(summarize_effect(16, Method::Jerolon, "ie2", 1.35788,
                                       {1.31, 1.42, 1.36}, {interval(1.2, 1.5)}));
    records.push_back(summarize_effect(7, Method::Wang, "ie1", 1.9, {}, {}));  // all-NaN row

    for (ResultsFormat format : {ResultsFormat::Csv, ResultsFormat::Json}) {
        const std::string path =
            tmp.file(format == ResultsFormat::Csv ? "round.csv" : "round.json");
        export_results(records, path, format);
        const std::vector<MetricsRecord> back = import_results(path);
        INFO((format == ResultsFormat::Csv ? "csv" : "json"));
        CHECK(records_identical(records, back));
    }

    // The JSON file encodes the NaN metrics of the failed row as null.
    const std::string json_text = read_file(tmp.file("round.json"));
    CHECK(json_text.find("null") != std::string::npos);
    CHECK(json_text.find("nan") == std::string::npos);
}

TEST_CASE("import rejects malformed results files", "[simulation]") {
    TempDir tmp;
    const std::string bad_header = tmp.file("bad1.csv");
    write_file(bad_header, "scenario,method\n1,difference\n");
    CHECK_THROWS_AS(import_results(bad_header), DataError);

    const std::string bad_method = tmp.file("bad2.csv");
    write_file(bad_method,
               "scenario,method,effect,truth,percent_bias,mse,coverage,mean_width,n_used\n"
               "1,nonsense,te,1,0,0,0.9,0.5,10\n");
    CHECK_THROWS_AS(import_results(bad_method), DataError);

    const std::string empty = tmp.file("empty.txt");
    write_file(empty, "  \n");
    CHECK_THROWS_AS(import_results(empty), DataError);

    CHECK_THROWS_AS(import_results(tmp.file("missing.csv")), DataError);
}

TEST_CASE("run_scenario aggregates per method and effect against the oracle truth",
          "[simulation]") {
    ScenarioSpec spec = scenario_spec(2);
    BootstrapPlan plan;
    plan.n_resamples = 50;
    const std::vector<Method> methods = {Method::Difference, Method::Wang};
    ScenarioResult res =
        run_scenario(spec, 3, 500, methods, plan, derive_key(kSeed, 0x51Bull));

    CHECK(res.n_replicates == 3);
    const TrueEffects t = true_effects(spec);
    CHECK(std::abs(res.truth.te - t.te) < 1e-12);
    CHECK(std::abs(res.achieved_prevalence - marginal_prevalence(spec)) < 1e-12);

    // Difference contributes te/de/ie; Wang adds ie1/ie2.
    REQUIRE(res.records.size() == 8);
    CHECK(res.records[0].method == Method::Difference);
    CHECK(res.records[0].effect == "te");
    CHECK(res.records[3].method == Method::Wang);
    std::vector<std::string> wang_effects;
    for (std::size_t i = 3; i < 8; ++i) wang_effects.push_back(res.records[i].effect);
    CHECK(wang_effects == std::vector<std::string>{"te", "de", "ie", "ie1", "ie2"});
    for (const auto& rec : res.records) {
        CHECK(rec.scenario == 2);
        CHECK(rec.n_used == 3);
        CHECK(std::abs(rec.truth - (rec.effect == "te"    ? t.te
                                    : rec.effect == "de"  ? t.de
                                    : rec.effect == "ie"  ? t.ie
                                    : rec.effect == "ie1" ? t.ie1
                                                          : t.ie2)) < 1e-12);
        CHECK(rec.coverage >= 0.0);
        CHECK(rec.coverage <= 1.0);
        CHECK(rec.mean_width > 0.0);
        CHECK(std::isfinite(rec.percent_bias));
    }
}

TEST_CASE("run_scenario output does not depend on the thread count", "[simulation]") {
    ScenarioSpec spec = scenario_spec(2);
    BootstrapPlan plan;
    plan.n_resamples = 40;
    const std::vector<Method> methods = {Method::Difference, Method::Weighting};
    const std::uint64_t seed = derive_key(kSeed, 0x51Cull);

    const int saved = max_threads();
    set_max_threads(1);
    ScenarioResult serial = run_scenario(spec, 4, 300, methods, plan, seed);
    set_max_threads(8);
    ScenarioResult threaded = run_scenario(spec, 4, 300, methods, plan, seed);
    set_max_threads(saved);
    CHECK(records_identical(serial.records, threaded.records));
}

TEST_CASE("run_scenario validates its inputs", "[simulation]") {
    BootstrapPlan plan;
    CHECK_THROWS_AS(run_scenario(scenario_spec(1), 0, 100, {Method::Difference}, plan, 1),
                    UsageError);
    CHECK_THROWS_AS(run_scenario(scenario_spec(1), 2, 100, {}, plan, 1), UsageError);
}
