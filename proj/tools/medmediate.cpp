// Command-line front end: analyze a CSV, run simulation scenarios, print
// scenario truths, and summarize metrics files.
//
// Exit codes: 0 success, 1 computation failure, 2 usage error. Failures
// emit a machine-readable JSON object on stderr.
#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "medmediate/dataset.hpp"
#include "medmediate/errors.hpp"
#include "medmediate/estimators.hpp"
#include "medmediate/inference.hpp"
#include "medmediate/mediation_formula.hpp"
#include "medmediate/parallel.hpp"
#include "medmediate/rng.hpp"
#include "medmediate/scenario.hpp"
#include "medmediate/simulation.hpp"
#include "medmediate/version.hpp"

namespace {

using nlohmann::json;
namespace med = medmediate;

std::string format_double(double v) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

void print_error_json(const std::string& type, const std::string& message,
                      std::optional<double> achieved_error = std::nullopt) {
    json err;
    err["error"]["type"] = type;
    err["error"]["message"] = message;
    if (achieved_error) err["error"]["achieved_error"] = *achieved_error;
    std::cerr << err.dump() << "\n";
}

med::MediatorKind parse_kind(const std::string& text) {
    const auto kind = med::mediator_kind_from_string(text);
    if (!kind)
        throw med::UsageError("unknown mediator kind '" + text +
                              "' (expected 'binary' or 'continuous')");
    return *kind;
}

std::vector<std::pair<std::string, med::MediatorKind>> parse_mediator_specs(
    const std::vector<std::string>& specs) {
    std::vector<std::pair<std::string, med::MediatorKind>> out;
    for (const auto& spec : specs) {
        const auto colon = spec.find(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 >= spec.size())
            throw med::UsageError("mediator '" + spec + "' must be declared as NAME:KIND");
        out.emplace_back(spec.substr(0, colon), parse_kind(spec.substr(colon + 1)));
    }
    return out;
}

std::vector<med::Method> parse_methods(const std::vector<std::string>& names) {
    std::vector<med::Method> out;
    for (const auto& name : names) {
        if (name == "all") {
            return {med::Method::Difference, med::Method::Regression, med::Method::Weighting,
                    med::Method::IORW,       med::Method::Wang,       med::Method::Jerolon};
        }
        const auto m = med::method_from_string(name);
        if (!m) throw med::UsageError("unknown method '" + name + "'");
        if (std::find(out.begin(), out.end(), *m) != out.end())
            throw med::UsageError("method '" + name + "' listed twice");
        out.push_back(*m);
    }
    if (out.empty()) throw med::UsageError("no methods requested");
    return out;
}

std::vector<int> parse_scenario_ids(const std::string& text) {
    std::vector<int> ids;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ',')) {
        try {
            std::size_t used = 0;
            const int id = std::stoi(token, &used);
            if (used != token.size()) throw std::invalid_argument(token);
            ids.push_back(id);
        } catch (const std::exception&) {
            throw med::UsageError("malformed scenario id '" + token + "'");
        }
    }
    if (ids.empty()) throw med::UsageError("no scenario ids given");
    return ids;
}

/// Scenario from a JSON override file: an optional grid "id" selects the
/// base, every other field overrides the matching ScenarioSpec member.
med::ScenarioSpec scenario_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw med::UsageError("cannot open spec file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw med::UsageError("cannot parse spec file " + path + ": " + e.what());
    }
    if (!doc.is_object()) throw med::UsageError("spec file must hold a JSON object: " + path);

    med::ScenarioSpec spec;
    if (doc.contains("id")) spec = med::scenario_spec(doc.at("id").get<int>());

    const std::map<std::string, double med::ScenarioSpec::*> numeric_fields = {
        {"rho", &med::ScenarioSpec::rho},
        {"exposure_intercept", &med::ScenarioSpec::exposure_intercept},
        {"exposure_coef_c", &med::ScenarioSpec::exposure_coef_c},
        {"m1_intercept", &med::ScenarioSpec::m1_intercept},
        {"m1_coef_x", &med::ScenarioSpec::m1_coef_x},
        {"m1_coef_c", &med::ScenarioSpec::m1_coef_c},
        {"sigma1", &med::ScenarioSpec::sigma1},
        {"m2_intercept", &med::ScenarioSpec::m2_intercept},
        {"m2_coef_x", &med::ScenarioSpec::m2_coef_x},
        {"m2_coef_c", &med::ScenarioSpec::m2_coef_c},
        {"sigma2", &med::ScenarioSpec::sigma2},
        {"beta0", &med::ScenarioSpec::beta0},
        {"beta_x", &med::ScenarioSpec::beta_x},
        {"beta_m1", &med::ScenarioSpec::beta_m1},
        {"beta_m2", &med::ScenarioSpec::beta_m2},
        {"beta_interaction", &med::ScenarioSpec::beta_interaction},
        {"beta_c", &med::ScenarioSpec::beta_c},
    };
    try {
        for (const auto& [key, value] : doc.items()) {
            if (key == "id") continue;
            if (key == "kind1") {
                spec.kind1 = parse_kind(value.get<std::string>());
            } else if (key == "kind2") {
                spec.kind2 = parse_kind(value.get<std::string>());
            } else if (key == "interaction") {
                spec.interaction = value.get<bool>();
                if (!doc.contains("beta_interaction"))
                    spec.beta_interaction = spec.interaction ? 0.2 : 0.0;
            } else if (auto it = numeric_fields.find(key); it != numeric_fields.end()) {
                spec.*(it->second) = value.get<double>();
            } else {
                throw med::UsageError("unknown field '" + key + "' in spec file " + path);
            }
        }
    } catch (const json::exception& e) {
        throw med::UsageError("bad value in spec file " + path + ": " + e.what());
    }
    return spec;
}

void apply_thread_settings(int threads_flag) {
    if (threads_flag > 0) {
        med::set_max_threads(threads_flag);
        return;
    }
    if (const char* env = std::getenv("MEDMEDIATE_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) med::set_max_threads(n);
    }
}

json effect_json(double estimate, const std::optional<med::IntervalEstimate>& interval) {
    json e;
    e["estimate"] = estimate;
    if (interval) {
        e["lower"] = interval->lower;
        e["upper"] = interval->upper;
        e["width"] = interval->upper - interval->lower;
    } else {
        e["lower"] = nullptr;
        e["upper"] = nullptr;
        e["width"] = nullptr;
    }
    return e;
}

json estimates_json(const med::EffectEstimates& est) {
    json out;
    out["te"] = effect_json(est.te, est.te_interval);
    out["de"] = effect_json(est.de, est.de_interval);
    out["ie"] = effect_json(est.ie, est.ie_interval);
    if (est.ie1) out["ie1"] = effect_json(*est.ie1, est.ie1_interval);
    if (est.ie2) out["ie2"] = effect_json(*est.ie2, est.ie2_interval);
    return out;
}

void print_human_estimates(const std::string& method, const med::EffectEstimates& est) {
    const auto row = [&](const char* name, double value,
                         const std::optional<med::IntervalEstimate>& interval) {
        std::printf("  %-4s %8.3f", name, value);
        if (interval)
            std::printf("  (%.3f-%.3f)  width %.3f", interval->lower, interval->upper,
                        interval->upper - interval->lower);
        std::printf("\n");
    };
    std::printf("%s\n", method.c_str());
    row("te", est.te, est.te_interval);
    row("de", est.de, est.de_interval);
    row("ie", est.ie, est.ie_interval);
    if (est.ie1) row("ie1", *est.ie1, est.ie1_interval);
    if (est.ie2) row("ie2", *est.ie2, est.ie2_interval);
}

struct AnalyzeArgs {
    std::string data, outcome, exposure, out_path;
    std::vector<std::string> mediators, covariates, methods;
    int boot = 200;
    std::uint64_t seed = 0;
    bool as_json = false;
};

int run_analyze(const AnalyzeArgs& args) {
    med::RoleSpec roles;
    roles.outcome = args.outcome;
    roles.exposure = args.exposure;
    roles.mediators = parse_mediator_specs(args.mediators);
    roles.covariates = args.covariates;
    const std::vector<med::Method> methods = parse_methods(args.methods);
    if (args.boot < 1) throw med::UsageError("--boot must be positive");

    const med::Dataset ds = med::load_csv(args.data, roles);

    json result;
    result["data"] = args.data;
    result["n_rows"] = ds.n_rows();
    result["n_dropped_rows"] = ds.n_dropped_rows();
    result["seed"] = args.seed;
    std::vector<std::pair<std::string, med::EffectEstimates>> table;
    for (const med::Method m : methods) {
        med::EstimatorConfig cfg;
        cfg.method = m;
        cfg.rng_seed = med::derive_key(args.seed, 0xE577u, static_cast<std::uint64_t>(m));
        med::EffectEstimates est;
        if (m == med::Method::Jerolon) {
            est = med::estimate_jerolon(ds, cfg);
        } else {
            med::BootstrapPlan plan;
            plan.n_resamples = static_cast<std::size_t>(args.boot);
            plan.seed = med::derive_key(args.seed, 0xB007u, static_cast<std::uint64_t>(m));
            est = med::bootstrap_ci(ds, m, cfg, plan).estimates;
        }
        result["methods"][med::to_string(m)] = estimates_json(est);
        table.emplace_back(med::to_string(m), est);
    }

    if (!args.out_path.empty()) {
        std::ofstream out(args.out_path, std::ios::binary);
        if (!out) throw med::DataError("cannot open output file: " + args.out_path);
        out << result.dump(2) << "\n";
        if (!out) throw med::DataError("failed writing output file: " + args.out_path);
    }
    if (args.as_json) {
        std::cout << result.dump(2) << "\n";
    } else {
        if (ds.n_dropped_rows() > 0)
            std::printf("note: dropped %zu rows with missing values\n", ds.n_dropped_rows());
        for (const auto& [name, est] : table) print_human_estimates(name, est);
    }
    return 0;
}

struct SimulateArgs {
    std::string scenario_ids, spec_path, out_dir;
    std::vector<std::string> methods;
    int replicates = 200;
    int n = 1000;
    int boot = 200;
    std::uint64_t seed = 0;
};

int run_simulate(const SimulateArgs& args) {
    if (args.scenario_ids.empty() == args.spec_path.empty())
        throw med::UsageError("exactly one of --scenario and --spec is required");
    if (args.replicates < 1) throw med::UsageError("--replicates must be positive");
    if (args.n < 1) throw med::UsageError("--n must be positive");
    if (args.boot < 1) throw med::UsageError("--boot must be positive");
    const std::vector<med::Method> methods = parse_methods(args.methods);

    std::vector<med::ScenarioSpec> specs;
    if (!args.scenario_ids.empty()) {
        for (const int id : parse_scenario_ids(args.scenario_ids))
            specs.push_back(med::scenario_spec(id));
    } else {
        specs.push_back(scenario_from_json_file(args.spec_path));
    }

    std::filesystem::create_directories(args.out_dir);

    med::BootstrapPlan plan;
    plan.n_resamples = static_cast<std::size_t>(args.boot);

    std::vector<med::MetricsRecord> all_records;
    json meta;
    meta["version"] = MEDMEDIATE_VERSION;
    meta["seed"] = args.seed;
    meta["n"] = args.n;
    meta["replicates"] = args.replicates;
    meta["boot"] = args.boot;
    for (const med::Method m : methods) meta["methods"].push_back(med::to_string(m));
    meta["scenarios"] = json::array();

    for (const auto& spec : specs) {
        const med::ScenarioResult res =
            med::run_scenario(spec, static_cast<std::size_t>(args.replicates),
                              static_cast<std::size_t>(args.n), methods, plan, args.seed);
        all_records.insert(all_records.end(), res.records.begin(), res.records.end());
        json s;
        s["id"] = spec.id;
        s["beta0"] = spec.beta0;
        s["rho"] = spec.rho;
        s["kind1"] = med::to_string(spec.kind1);
        s["kind2"] = med::to_string(spec.kind2);
        s["interaction"] = spec.interaction;
        s["achieved_prevalence"] = res.achieved_prevalence;
        s["truth"]["te"] = res.truth.te;
        s["truth"]["de"] = res.truth.de;
        s["truth"]["ie"] = res.truth.ie;
        s["truth"]["ie1"] = res.truth.ie1;
        s["truth"]["ie2"] = res.truth.ie2;
        s["truth"]["estimated_abs_error"] = res.truth.estimated_abs_error;
        s["n_replicates"] = res.n_replicates;
        meta["scenarios"].push_back(std::move(s));
    }

    const auto out = std::filesystem::path(args.out_dir);
    med::export_results(all_records, (out / "metrics.csv").string(), med::ResultsFormat::Csv);
    med::export_results(all_records, (out / "metrics.json").string(), med::ResultsFormat::Json);
    std::ofstream meta_out(out / "run_metadata.json", std::ios::binary);
    if (!meta_out) throw med::DataError("cannot write run metadata in " + args.out_dir);
    meta_out << meta.dump(2) << "\n";
    std::printf("wrote %zu metric rows to %s\n", all_records.size(), args.out_dir.c_str());
    return 0;
}

struct TruthArgs {
    int scenario_id = 0;
    std::string spec_path;
    bool as_json = false;
};

int run_truth(const TruthArgs& args) {
    if ((args.scenario_id != 0) == !args.spec_path.empty())
        throw med::UsageError("exactly one of --scenario and --spec is required");
    const med::ScenarioSpec spec = args.scenario_id != 0
                                       ? med::scenario_spec(args.scenario_id)
                                       : scenario_from_json_file(args.spec_path);
    const med::TrueEffects t = med::true_effects(spec);
    if (args.as_json) {
        json out;
        out["te"] = t.te;
        out["de"] = t.de;
        out["ie"] = t.ie;
        out["ie1"] = t.ie1;
        out["ie2"] = t.ie2;
        out["estimated_abs_error"] = t.estimated_abs_error;
        std::cout << out.dump(2) << "\n";
    } else {
        std::printf("te  = %.12g\n", t.te);
        std::printf("de  = %.12g\n", t.de);
        std::printf("ie  = %.12g\n", t.ie);
        std::printf("ie1 = %.12g\n", t.ie1);
        std::printf("ie2 = %.12g\n", t.ie2);
        std::printf("estimated_abs_error = %.3g\n", t.estimated_abs_error);
    }
    return 0;
}

struct ReportArgs {
    std::string in_dir, out_path;
};

int run_report(const ReportArgs& args) {
    if (!std::filesystem::is_directory(args.in_dir))
        throw med::DataError("input directory does not exist: " + args.in_dir);
    // Metrics are read from CSV files only: simulate writes the same
    // records as both .csv and .json, so scanning both would double-count.
    std::vector<std::string> files;
    for (const auto& entry : std::filesystem::directory_iterator(args.in_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw med::DataError("no .csv metrics files in " + args.in_dir);

    std::vector<med::MetricsRecord> records;
    for (const auto& file : files) {
        const auto batch = med::import_results(file);
        records.insert(records.end(), batch.begin(), batch.end());
    }

    std::set<std::tuple<int, std::string, std::string>> seen;
    for (const auto& r : records) {
        if (!seen.emplace(r.scenario, med::to_string(r.method), r.effect).second)
            throw med::DataError("duplicate results for scenario " + std::to_string(r.scenario) +
                                 ", method " + med::to_string(r.method) + ", effect " + r.effect);
    }

    // Group into one wide row per (scenario, method).
    std::map<std::pair<int, int>, std::map<std::string, const med::MetricsRecord*>> grouped;
    for (const auto& r : records)
        grouped[{r.scenario, static_cast<int>(r.method)}][r.effect] = &r;

    const std::vector<std::string> effects = {"te", "de", "ie", "ie1", "ie2"};
    std::ofstream out(args.out_path, std::ios::binary);
    if (!out) throw med::DataError("cannot open output file: " + args.out_path);
    out << "# percent_bias reference thresholds: 10,-10\n";
    out << "scenario,method,n_used";
    for (const auto& e : effects)
        out << ',' << e << "_truth," << e << "_percent_bias," << e << "_mse," << e << "_coverage,"
            << e << "_mean_width";
    out << "\n";
    for (const auto& [key, row] : grouped) {
        std::size_t n_used = 0;
        for (const auto& [effect, rec] : row) n_used = std::max(n_used, rec->n_used);
        out << key.first << ',' << med::to_string(static_cast<med::Method>(key.second)) << ','
            << n_used;
        for (const auto& e : effects) {
            const auto it = row.find(e);
            if (it == row.end()) {
                out << ",,,,,";
            } else {
                out << ',' << format_double(it->second->truth) << ','
                    << format_double(it->second->percent_bias) << ','
                    << format_double(it->second->mse) << ',' << format_double(it->second->coverage)
                    << ',' << format_double(it->second->mean_width);
            }
        }
        out << "\n";
    }
    if (!out) throw med::DataError("failed writing output file: " + args.out_path);
    std::printf("wrote summary for %zu (scenario, method) pairs to %s\n", grouped.size(),
                args.out_path.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal mediation analysis for multiple correlated mediators"};
    app.set_version_flag("--version", MEDMEDIATE_VERSION);
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads,
                   "Worker thread cap (default: MEDMEDIATE_THREADS or all cores)");

    AnalyzeArgs analyze;
    CLI::App* cmd_analyze = app.add_subcommand("analyze", "Estimate mediation effects on a CSV");
    cmd_analyze->add_option("--data", analyze.data, "Input CSV path")->required();
    cmd_analyze->add_option("--outcome", analyze.outcome, "Outcome column (binary 0/1)")
        ->required();
    cmd_analyze->add_option("--exposure", analyze.exposure, "Exposure column (binary 0/1)")
        ->required();
    cmd_analyze
        ->add_option("--mediators", analyze.mediators,
                     "Mediator columns as NAME:KIND (kind: binary|continuous)")
        ->required()
        ->delimiter(',');
    cmd_analyze->add_option("--covariates", analyze.covariates, "Covariate columns")
        ->delimiter(',');
    cmd_analyze->add_option("--methods", analyze.methods, "Methods to run, or 'all'")
        ->required()
        ->delimiter(',');
    cmd_analyze->add_option("--boot", analyze.boot, "Bootstrap resamples (default 200)");
    cmd_analyze->add_option("--seed", analyze.seed, "RNG seed");
    cmd_analyze->add_option("--out", analyze.out_path, "Write results JSON to this path");
    cmd_analyze->add_flag("--json", analyze.as_json, "Print results as JSON instead of a table");

    SimulateArgs simulate;
    CLI::App* cmd_simulate = app.add_subcommand("simulate", "Run simulation scenarios");
    cmd_simulate->add_option("--scenario", simulate.scenario_ids,
                             "Comma-separated scenario ids (1..16)");
    cmd_simulate->add_option("--spec", simulate.spec_path, "Scenario override JSON file");
    cmd_simulate->add_option("--replicates", simulate.replicates, "Replicates per scenario");
    cmd_simulate->add_option("--n", simulate.n, "Rows per replicate dataset");
    cmd_simulate->add_option("--methods", simulate.methods, "Methods to run, or 'all'")
        ->required()
        ->delimiter(',');
    cmd_simulate->add_option("--boot", simulate.boot, "Bootstrap resamples (default 200)");
    cmd_simulate->add_option("--seed", simulate.seed, "RNG seed");
    cmd_simulate->add_option("--out", simulate.out_dir, "Output directory")->required();

    TruthArgs truth;
    CLI::App* cmd_truth = app.add_subcommand("truth", "Print a scenario's true effects");
    cmd_truth->add_option("--scenario", truth.scenario_id, "Scenario id (1..16)");
    cmd_truth->add_option("--spec", truth.spec_path, "Scenario override JSON file");
    cmd_truth->add_flag("--json", truth.as_json, "Print as JSON");

    ReportArgs report;
    CLI::App* cmd_report = app.add_subcommand("report", "Summarize metrics files");
    cmd_report->add_option("--in", report.in_dir, "Directory holding metrics CSV files")
        ->required();
    cmd_report->add_option("--out", report.out_path, "Summary CSV output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        print_error_json("UsageError", e.what());
        return 2;
    }

    try {
        apply_thread_settings(threads);
        if (cmd_analyze->parsed()) return run_analyze(analyze);
        if (cmd_simulate->parsed()) return run_simulate(simulate);
        if (cmd_truth->parsed()) return run_truth(truth);
        return run_report(report);
    } catch (const med::UsageError& e) {
        print_error_json("UsageError", e.what());
        return 2;
    } catch (const med::IntegrationError& e) {
        print_error_json("IntegrationError", e.what(), e.achieved_error);
        return 1;
    } catch (const med::Error& e) {
        std::string type = "Error";
        if (dynamic_cast<const med::DataError*>(&e) != nullptr) type = "DataError";
        if (dynamic_cast<const med::FitError*>(&e) != nullptr) type = "FitError";
        print_error_json(type, e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error_json("InternalError", e.what());
        return 1;
    }
}
