#include "medmediate/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "medmediate/errors.hpp"
#include "medmediate/estimators.hpp"
#include "medmediate/parallel.hpp"
#include "medmediate/rng.hpp"

namespace medmediate {

namespace {

constexpr std::uint64_t kDatasetTag = 0xDA7Au;
constexpr std::uint64_t kEstimatorTag = 0xE577u;
constexpr std::uint64_t kBootstrapTag = 0xB007u;
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

struct EffectView {
    double estimate = kNan;
    std::optional<IntervalEstimate> interval;
};

EffectView view_effect(const EffectEstimates& e, const std::string& name) {
    if (name == "te") return {e.te, e.te_interval};
    if (name == "de") return {e.de, e.de_interval};
    if (name == "ie") return {e.ie, e.ie_interval};
    if (name == "ie1") return {e.ie1.value_or(kNan), e.ie1_interval};
    return {e.ie2.value_or(kNan), e.ie2_interval};
}

double truth_of(const TrueEffects& t, const std::string& name) {
    if (name == "te") return t.te;
    if (name == "de") return t.de;
    if (name == "ie") return t.ie;
    if (name == "ie1") return t.ie1;
    return t.ie2;
}

std::string format_double(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

double parse_double(const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw DataError("malformed number in results file: " + text);
        return v;
    } catch (const std::invalid_argument&) {
        throw DataError("malformed number in results file: " + text);
    } catch (const std::out_of_range&) {
        throw DataError("number out of range in results file: " + text);
    }
}

const char* kCsvHeader = "scenario,method,effect,truth,percent_bias,mse,coverage,mean_width,n_used";

}  // namespace

ScenarioResult run_scenario(const ScenarioSpec& spec, std::size_t n_replicates, std::size_t n,
                            const std::vector<Method>& methods, const BootstrapPlan& plan,
                            std::uint64_t seed) {
    if (n_replicates == 0) throw UsageError("run_scenario needs at least one replicate");
    if (methods.empty()) throw UsageError("run_scenario needs at least one method");

    ScenarioResult result;
    result.truth = true_effects(spec);  // oracle failure aborts the scenario
    result.achieved_prevalence = marginal_prevalence(spec);
    result.n_replicates = n_replicates;

    const auto scenario_tag = static_cast<std::uint64_t>(spec.id);
    const std::size_t n_methods = methods.size();

    // estimates[r][mi]: the method's estimate (with intervals) on replicate
    // r, or nullopt when it failed there.
    std::vector<std::vector<std::optional<EffectEstimates>>> estimates(
        n_replicates, std::vector<std::optional<EffectEstimates>>(n_methods));

    parallel_for(n_replicates, [&](std::size_t r) {
        const Dataset ds = generate_dataset(spec, n, derive_key(seed, kDatasetTag, scenario_tag, r));
        for (std::size_t mi = 0; mi < n_methods; ++mi) {
            const Method m = methods[mi];
            const auto method_tag = static_cast<std::uint64_t>(m);
            EstimatorConfig cfg;
            cfg.method = m;
            cfg.include_interaction = spec.interaction && capabilities(m).interaction_supported;
            cfg.rng_seed = derive_key(seed, kEstimatorTag, scenario_tag, r, method_tag);
            try {
                if (m == Method::Jerolon) {
                    estimates[r][mi] = estimate_jerolon(ds, cfg);
                } else {
                    BootstrapPlan bp = plan;
                    bp.seed = derive_key(seed, kBootstrapTag, scenario_tag, r, method_tag);
                    estimates[r][mi] = bootstrap_ci(ds, m, cfg, bp).estimates;
                }
            } catch (const FitError&) {
            } catch (const IntegrationError&) {
            }
        }
    });

    for (std::size_t mi = 0; mi < n_methods; ++mi) {
        const Method m = methods[mi];
        std::vector<std::string> effects = {"te", "de", "ie"};
        if (capabilities(m).path_specific) {
            effects.emplace_back("ie1");
            effects.emplace_back("ie2");
        }
        for (const auto& effect : effects) {
            std::vector<double> point_estimates;
            std::vector<IntervalEstimate> intervals;
            for (std::size_t r = 0; r < n_replicates; ++r) {
                if (!estimates[r][mi]) continue;
                const EffectView v = view_effect(*estimates[r][mi], effect);
                point_estimates.push_back(v.estimate);
                if (v.interval) intervals.push_back(*v.interval);
            }
            result.records.push_back(summarize_effect(spec.id, m, effect,
                                                      truth_of(result.truth, effect),
                                                      point_estimates, intervals));
        }
    }
    return result;
}

MetricsRecord summarize_effect(int scenario, Method method, const std::string& effect,
                               double truth, const std::vector<double>& estimates,
                               const std::vector<IntervalEstimate>& intervals) {
    MetricsRecord rec;
    rec.scenario = scenario;
    rec.method = method;
    rec.effect = effect;
    rec.truth = truth;
    rec.n_used = estimates.size();
    if (!estimates.empty()) {
        double sum = 0.0, sum_sq_err = 0.0;
        for (double est : estimates) {
            sum += est;
            sum_sq_err += (est - truth) * (est - truth);
        }
        const double mean_est = sum / static_cast<double>(estimates.size());
        rec.percent_bias = 100.0 * (mean_est - truth) / truth;
        rec.mse = sum_sq_err / static_cast<double>(estimates.size());
    } else {
        rec.percent_bias = kNan;
        rec.mse = kNan;
    }
    if (!intervals.empty()) {
        double sum_width = 0.0;
        std::size_t n_covered = 0;
        for (const auto& iv : intervals) {
            sum_width += iv.upper - iv.lower;
            if (iv.lower <= truth && truth <= iv.upper) ++n_covered;
        }
        rec.coverage = static_cast<double>(n_covered) / static_cast<double>(intervals.size());
        rec.mean_width = sum_width / static_cast<double>(intervals.size());
    } else {
        rec.coverage = kNan;
        rec.mean_width = kNan;
    }
    return rec;
}

void export_results(const std::vector<MetricsRecord>& records, const std::string& path,
                    ResultsFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open results file for writing: " + path);
    if (format == ResultsFormat::Csv) {
        out << kCsvHeader << "\n";
        for (const auto& r : records) {
            out << r.scenario << ',' << to_string(r.method) << ',' << r.effect << ','
                << format_double(r.truth) << ',' << format_double(r.percent_bias) << ','
                << format_double(r.mse) << ',' << format_double(r.coverage) << ','
                << format_double(r.mean_width) << ',' << r.n_used << "\n";
        }
    } else {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : records) {
            nlohmann::json row;
            row["scenario"] = r.scenario;
            row["method"] = to_string(r.method);
            row["effect"] = r.effect;
            // NaN metrics (possible when a method failed on all replicates)
            // serialize as JSON null and import back as NaN.
            row["truth"] = r.truth;
            row["percent_bias"] = r.percent_bias;
            row["mse"] = r.mse;
            row["coverage"] = r.coverage;
            row["mean_width"] = r.mean_width;
            row["n_used"] = r.n_used;
            arr.push_back(std::move(row));
        }
        out << arr.dump(2) << "\n";
    }
    if (!out) throw DataError("failed writing results file: " + path);
}

namespace {

Method parse_method(const std::string& name) {
    const auto m = method_from_string(name);
    if (!m) throw DataError("unknown method in results file: " + name);
    return *m;
}

double json_metric(const nlohmann::json& row, const char* key) {
    const auto& v = row.at(key);
    if (v.is_null()) return kNan;
    return v.get<double>();
}

std::vector<MetricsRecord> import_json(const std::string& text, const std::string& path) {
    nlohmann::json arr;
    try {
        arr = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError("cannot parse JSON results file " + path + ": " + e.what());
    }
    if (!arr.is_array()) throw DataError("JSON results file must hold an array: " + path);
    std::vector<MetricsRecord> records;
    records.reserve(arr.size());
    try {
        for (const auto& row : arr) {
            MetricsRecord r;
            r.scenario = row.at("scenario").get<int>();
            r.method = parse_method(row.at("method").get<std::string>());
            r.effect = row.at("effect").get<std::string>();
            r.truth = json_metric(row, "truth");
            r.percent_bias = json_metric(row, "percent_bias");
            r.mse = json_metric(row, "mse");
            r.coverage = json_metric(row, "coverage");
            r.mean_width = json_metric(row, "mean_width");
            r.n_used = row.at("n_used").get<std::size_t>();
            records.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError("malformed record in JSON results file " + path + ": " + e.what());
    }
    return records;
}

std::vector<MetricsRecord> import_csv(const std::string& text, const std::string& path) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty results file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader)
        throw DataError("results file " + path + " has unexpected header: " + line);
    std::vector<MetricsRecord> records;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream row(line);
        while (std::getline(row, field, ',')) fields.push_back(field);
        if (fields.size() != 9)
            throw DataError("results file " + path + " has a row with " +
                            std::to_string(fields.size()) + " fields (expected 9): " + line);
        MetricsRecord r;
        r.scenario = static_cast<int>(parse_double(fields[0]));
        r.method = parse_method(fields[1]);
        r.effect = fields[2];
        r.truth = parse_double(fields[3]);
        r.percent_bias = parse_double(fields[4]);
        r.mse = parse_double(fields[5]);
        r.coverage = parse_double(fields[6]);
        r.mean_width = parse_double(fields[7]);
        r.n_used = static_cast<std::size_t>(parse_double(fields[8]));
        records.push_back(std::move(r));
    }
    return records;
}

}  // namespace

std::vector<MetricsRecord> import_results(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open results file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw DataError("empty results file: " + path);
    if (text[first] == '[') return import_json(text, path);
    return import_csv(text, path);
}

double marginal_prevalence(const ScenarioSpec& spec) {
    CounterfactualQuery q;
    q.outcome = dgp_outcome_model(spec);
    q.mediators = dgp_mediator_law(spec);
    double total = 0.0;
    for (int c = 0; c <= 1; ++c) {
        q.covariates.rows = {{static_cast<double>(c)}};
        q.covariates.weights = {1.0};
        const double logit_x = spec.exposure_intercept + spec.exposure_coef_c * c;
        const double p_x1 = 1.0 / (1.0 + std::exp(-logit_x));
        for (int x = 0; x <= 1; ++x) {
            q.x_outcome = x;
            q.x_med1 = x;
            q.x_med2 = x;
            const double p_x = x == 1 ? p_x1 : 1.0 - p_x1;
            total += 0.5 * p_x * counterfactual_mean(q).value;
        }
    }
    return total;
}

double check_prevalence(const ScenarioSpec& spec) {
    const double p = marginal_prevalence(spec);
    if (!(p >= 0.25 && p <= 0.4))
        throw UsageError("scenario outcome prevalence " + format_double(p) +
                         " is outside the target band [0.25, 0.4]; override beta0 "
                         "(calibrate_beta0 suggests a value)");
    return p;
}

double calibrate_beta0(const ScenarioSpec& spec, double target) {
    if (!(target > 0.0 && target < 1.0))
        throw UsageError("target prevalence must lie strictly between 0 and 1");
    ScenarioSpec probe = spec;
    double lo = -30.0, hi = 30.0;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        probe.beta0 = mid;
        // Prevalence is strictly increasing in beta0 (expit is increasing).
        if (marginal_prevalence(probe) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-10) break;
    }
    return 0.5 * (lo + hi);
}

}  // namespace medmediate
