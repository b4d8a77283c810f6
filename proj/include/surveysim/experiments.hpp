#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "surveysim/backend.hpp"
#include "surveysim/catalog.hpp"
#include "surveysim/collect.hpp"
#include "surveysim/countries.hpp"
#include "surveysim/errors.hpp"
#include "surveysim/permutation.hpp"
#include "surveysim/persona.hpp"
#include "surveysim/rng.hpp"
#include "surveysim/scores.hpp"
#include "surveysim/sha256.hpp"

namespace surveysim {

// How each persona's prompting language is chosen: one fixed language, the
// country's majority language, or one of the two shuffle controls.
struct LanguagePlan {
    enum class Mode { Monolingual, Native, CountryShuffled, FullShuffled };

    Mode mode = Mode::Monolingual;
    std::string monolingual_code = "EN";
    std::map<Country, std::string> country_language_map = default_country_language_map();
    std::uint64_t shuffle_seed = 0;
};

inline std::string_view plan_mode_name(LanguagePlan::Mode mode) {
    switch (mode) {
        case LanguagePlan::Mode::Monolingual: return "monolingual";
        case LanguagePlan::Mode::Native: return "native";
        case LanguagePlan::Mode::CountryShuffled: return "country_shuffled";
        case LanguagePlan::Mode::FullShuffled: return "full_shuffled";
    }
    return "monolingual";
}

// Permute which language each country uses while keeping the number of
// countries per language fixed (three use DE, two use EN, ten are unique).
inline std::map<Country, std::string> shuffle_country_languages(
    const std::map<Country, std::string>& map, std::uint64_t seed) {
    std::vector<std::string> languages;
    languages.reserve(map.size());
    for (const auto& [c, lang] : map) languages.push_back(lang);
    SplitMix64 rng(derive_seed(seed, "country-shuffle"));
    deterministic_shuffle(languages, rng);
    std::map<Country, std::string> out;
    std::size_t i = 0;
    for (const auto& [c, lang] : map) out[c] = languages[i++];
    return out;
}

inline std::string resolve_language(const Persona& persona, const LanguagePlan& plan) {
    switch (plan.mode) {
        case LanguagePlan::Mode::Monolingual:
            if (!is_known_language(plan.monolingual_code)) {
                throw ConfigError("language plan: unknown monolingual code '" +
                                  plan.monolingual_code + "'");
            }
            return plan.monolingual_code;
        case LanguagePlan::Mode::Native: {
            auto it = plan.country_language_map.find(persona.country);
            if (it == plan.country_language_map.end()) {
                throw ConfigError("language plan: country " +
                                  std::string(country_code(persona.country)) +
                                  " has no native-language mapping");
            }
            return it->second;
        }
        case LanguagePlan::Mode::CountryShuffled: {
            const auto shuffled =
                shuffle_country_languages(plan.country_language_map, plan.shuffle_seed);
            auto it = shuffled.find(persona.country);
            if (it == shuffled.end()) {
                throw ConfigError("language plan: country " +
                                  std::string(country_code(persona.country)) +
                                  " has no mapping after shuffle");
            }
            return it->second;
        }
        case LanguagePlan::Mode::FullShuffled:
            throw std::invalid_argument(
                "resolve_language: full-shuffled assignment is population-level; use "
                "assign_languages");
    }
    throw ConfigError("language plan: invalid mode");
}

// Reassign the native-language multiset uniformly across participants; the
// per-language participant counts match the native assignment exactly.
inline std::unordered_map<std::string, std::string> shuffle_full(
    const std::vector<Persona>& personas, const std::map<Country, std::string>& native_map,
    std::uint64_t seed) {
    std::vector<std::string> languages;
    languages.reserve(personas.size());
    for (const Persona& p : personas) {
        auto it = native_map.find(p.country);
        if (it == native_map.end()) {
            throw ConfigError("language plan: country " + std::string(country_code(p.country)) +
                              " has no native-language mapping");
        }
        languages.push_back(it->second);
    }
    SplitMix64 rng(derive_seed(seed, "full-shuffle"));
    deterministic_shuffle(languages, rng);
    std::unordered_map<std::string, std::string> out;
    out.reserve(personas.size());
    for (std::size_t i = 0; i < personas.size(); ++i) out[personas[i].id] = languages[i];
    return out;
}

// Per-persona language assignment for any plan mode.
inline std::unordered_map<std::string, std::string> assign_languages(
    const std::vector<Persona>& personas, const LanguagePlan& plan) {
    if (plan.mode == LanguagePlan::Mode::FullShuffled) {
        return shuffle_full(personas, plan.country_language_map, plan.shuffle_seed);
    }
    std::unordered_map<std::string, std::string> out;
    out.reserve(personas.size());
    for (const Persona& p : personas) out[p.id] = resolve_language(p, plan);
    return out;
}

inline nlohmann::json plan_to_json(const LanguagePlan& plan, bool mask) {
    nlohmann::json languages = nlohmann::json::object();
    for (const auto& [c, lang] : plan.country_language_map) {
        languages[std::string(country_code(c))] = lang;
    }
    return nlohmann::json{
        {"mode", std::string(plan_mode_name(plan.mode))},
        {"monolingual_code", plan.monolingual_code},
        {"country_language_map", languages},
        {"shuffle_seed", plan.shuffle_seed},
        {"mask_nationality", mask},
    };
}

struct RunManifest {
    std::string experiment_id;
    std::string population_digest;
    nlohmann::json plan;
    std::string backend_fingerprint;
    std::uint64_t analysis_seed = 0;
    int n_perm = 0;
    std::string created_utc;
    std::map<std::string, std::string> outputs;
};

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buffer[32];
    std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buffer;
}

inline nlohmann::json manifest_to_json(const RunManifest& m) {
    return nlohmann::json{
        {"v", 1},
        {"experiment_id", m.experiment_id},
        {"population_digest", m.population_digest},
        {"plan", m.plan},
        {"backend", m.backend_fingerprint},
        {"analysis_seed", m.analysis_seed},
        {"n_perm", m.n_perm},
        {"created_utc", m.created_utc},
        {"outputs", m.outputs},
    };
}

struct ExperimentConfig {
    std::filesystem::path out_dir;
    CoefficientTable reference;
    int n_perm = 199;
    std::uint64_t seed = 0;
    int reps = 100; // shuffle repetitions in experiment 3
    int concurrency = 1;
    double max_failure_fraction = 0.05;
};

struct RunOutput {
    CoefficientTable coefficients;
    SignAgreementReport report;
    std::filesystem::path dir;
};

// One full pipeline pass: manifest first, then collect -> score -> fit ->
// agreement -> permutation, persisting every artifact into its run directory.
inline RunOutput run_single(const std::vector<Persona>& personas, const CatalogSet& catalogs,
                            RespondentBackend& backend, const LanguagePlan& plan, bool mask,
                            const std::string& experiment_id, const ExperimentConfig& config) {
    const std::filesystem::path dir = config.out_dir / experiment_id;
    std::filesystem::create_directories(dir);

    CollectionPlan collection;
    collection.mask_nationality = mask;
    collection.language_by_persona = assign_languages(personas, plan);
    collection.max_failure_fraction = config.max_failure_fraction;
    collection.concurrency = config.concurrency;

    RunManifest manifest;
    manifest.experiment_id = experiment_id;
    manifest.population_digest = sha256_hex(serialize_population(personas));
    manifest.plan = plan_to_json(plan, mask);
    manifest.backend_fingerprint = backend.fingerprint();
    manifest.analysis_seed = derive_seed(config.seed, experiment_id);
    manifest.n_perm = config.n_perm;
    manifest.created_utc = utc_timestamp();
    manifest.outputs = {
        {"responses", "responses.jsonl"},
        {"scores", "scores.csv"},
        {"coefficients", "coefficients.json"},
        {"report", "report.json"},
    };
    {
        std::ofstream file(dir / "manifest.json", std::ios::binary);
        if (!file) throw ConfigError("cannot write manifest in " + dir.string());
        file << manifest_to_json(manifest).dump(1) << '\n';
    }

    const CollectionResult collected = collect_responses(personas, catalogs, collection, backend);
    save_responses(collected.records, dir / "responses.jsonl");
    if (!collected.failures.empty()) {
        std::ofstream file(dir / "failures.jsonl", std::ios::binary);
        for (const ProbeFailure& f : collected.failures) {
            file << nlohmann::json{{"persona_id", f.persona_id},
                                   {"probe", std::string(probe_token(f.probe))},
                                   {"reason", f.reason}}
                        .dump()
                 << '\n';
        }
    }

    const ScoreResult scored = compute_scores(collected.records, personas);
    save_scores_csv(scored.scores, dir / "scores.csv");

    const AnalysisResult analysis =
        analyze_scores(scored.scores, config.reference, {config.n_perm, manifest.analysis_seed});

    RunOutput out;
    out.coefficients = analysis.coefficients;
    out.report = analysis.report;
    out.report.mode = std::string(plan_mode_name(plan.mode));
    out.report.language_code =
        plan.mode == LanguagePlan::Mode::Monolingual ? plan.monolingual_code : std::string();
    out.report.masked = mask;
    out.dir = dir;
    {
        std::ofstream file(dir / "coefficients.json", std::ios::binary);
        file << coefficient_table_to_json(out.coefficients).dump(1) << '\n';
    }
    {
        std::ofstream file(dir / "report.json", std::ios::binary);
        file << report_to_json(out.report).dump(1) << '\n';
    }
    return out;
}

struct Experiment1Result {
    RunOutput unmasked;
    RunOutput masked;
};

// Experiment 1: English prompts, nationality unmasked vs masked.
inline Experiment1Result run_experiment1(const std::vector<Persona>& personas,
                                         const CatalogSet& catalogs, RespondentBackend& backend,
                                         const ExperimentConfig& config) {
    LanguagePlan plan;
    plan.mode = LanguagePlan::Mode::Monolingual;
    plan.monolingual_code = "EN";
    require_catalog(catalogs, "EN");
    Experiment1Result result;
    result.unmasked = run_single(personas, catalogs, backend, plan, false, "unmasked", config);
    result.masked = run_single(personas, catalogs, backend, plan, true, "masked", config);
    return result;
}

// Experiment 2: one monolingual run per language, nationality unmasked.
// Every catalog must load before any prompt is dispatched.
inline std::vector<RunOutput> run_experiment2(const std::vector<Persona>& personas,
                                              const CatalogSet& catalogs,
                                              RespondentBackend& backend,
                                              const ExperimentConfig& config) {
    for (std::string_view code : kLanguageCodes) require_catalog(catalogs, std::string(code));

    std::vector<RunOutput> results;
    results.reserve(kLanguageCodes.size());
    for (std::string_view code : kLanguageCodes) {
        LanguagePlan plan;
        plan.mode = LanguagePlan::Mode::Monolingual;
        plan.monolingual_code = std::string(code);
        results.push_back(run_single(personas, catalogs, backend, plan, false,
                                     "lang-" + std::string(code), config));
    }
    return results;
}

struct MetricSummary {
    double mean = 0.0;
    double sd = 0.0;
    std::vector<double> values;
    std::vector<double> p_values;
};

struct RepetitionSummary {
    std::map<std::string, MetricSummary> metrics; // keyed by pooled_metric_keys()
    int rep_count = 0;
    bool degenerate_sd = false; // single repetition: sd reported as 0 by convention
};

inline RepetitionSummary summarize_repetitions(const std::vector<SignAgreementReport>& reports) {
    if (reports.empty()) throw std::invalid_argument("summarize_repetitions: no reports");
    RepetitionSummary summary;
    summary.rep_count = static_cast<int>(reports.size());
    summary.degenerate_sd = reports.size() == 1;
    for (const std::string& key : pooled_metric_keys()) {
        MetricSummary metric;
        for (const SignAgreementReport& report : reports) {
            metric.values.push_back(report.pooled.at(key).rate);
            if (report.pooled.at(key).p_value) {
                metric.p_values.push_back(*report.pooled.at(key).p_value);
            }
        }
        double sum = 0.0;
        for (double v : metric.values) sum += v;
        metric.mean = sum / static_cast<double>(metric.values.size());
        if (metric.values.size() > 1) {
            double ss = 0.0;
            for (double v : metric.values) ss += (v - metric.mean) * (v - metric.mean);
            metric.sd = std::sqrt(ss / static_cast<double>(metric.values.size() - 1));
        }
        summary.metrics[key] = std::move(metric);
    }
    return summary;
}

inline nlohmann::json repetition_summary_to_json(const RepetitionSummary& summary) {
    nlohmann::json metrics = nlohmann::json::object();
    for (const auto& [key, metric] : summary.metrics) {
        metrics[key] = {{"mean", metric.mean},
                        {"sd", metric.sd},
                        {"values", metric.values},
                        {"p_values", metric.p_values}};
    }
    return nlohmann::json{{"v", 1},
                          {"rep_count", summary.rep_count},
                          {"degenerate_sd", summary.degenerate_sd},
                          {"metrics", metrics}};
}

inline RepetitionSummary repetition_summary_from_json(const nlohmann::json& j) {
    RepetitionSummary summary;
    try {
        summary.rep_count = j.at("rep_count").get<int>();
        summary.degenerate_sd = j.value("degenerate_sd", false);
        for (const auto& [key, entry] : j.at("metrics").items()) {
            MetricSummary metric;
            metric.mean = entry.at("mean").get<double>();
            metric.sd = entry.at("sd").get<double>();
            metric.values = entry.at("values").get<std::vector<double>>();
            if (entry.contains("p_values")) {
                metric.p_values = entry.at("p_values").get<std::vector<double>>();
            }
            summary.metrics[key] = std::move(metric);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("repetition summary: ") + e.what());
    }
    return summary;
}

struct Experiment3Result {
    RunOutput native;
    RepetitionSummary country_shuffled;
    RepetitionSummary full_shuffled;
};

// Experiment 3: native-language prompting once, plus the two shuffle controls
// repeated `reps` times with independently derived seeds.
inline Experiment3Result run_experiment3(const std::vector<Persona>& personas,
                                         const CatalogSet& catalogs, RespondentBackend& backend,
                                         const ExperimentConfig& config) {
    if (config.reps < 1) throw std::invalid_argument("run_experiment3: reps must be >= 1");
    for (std::string_view code : kLanguageCodes) require_catalog(catalogs, std::string(code));

    Experiment3Result result;
    {
        LanguagePlan plan;
        plan.mode = LanguagePlan::Mode::Native;
        result.native = run_single(personas, catalogs, backend, plan, false, "native", config);
    }

    auto run_mode = [&](LanguagePlan::Mode mode, const std::string& name) {
        std::vector<SignAgreementReport> reports;
        reports.reserve(static_cast<std::size_t>(config.reps));
        for (int rep = 0; rep < config.reps; ++rep) {
            LanguagePlan plan;
            plan.mode = mode;
            plan.shuffle_seed = derive_seed(config.seed, "exp3/" + name,
                                            static_cast<std::uint64_t>(rep));
            char rep_id[32];
            std::snprintf(rep_id, sizeof(rep_id), "rep-%03d", rep);
            reports.push_back(run_single(personas, catalogs, backend, plan, false,
                                         name + "/" + rep_id, config)
                                  .report);
        }
        return summarize_repetitions(reports);
    };
    result.country_shuffled = run_mode(LanguagePlan::Mode::CountryShuffled, "country_shuffled");
    result.full_shuffled = run_mode(LanguagePlan::Mode::FullShuffled, "full_shuffled");

    {
        std::ofstream file(config.out_dir / "country_shuffled_summary.json", std::ios::binary);
        file << repetition_summary_to_json(result.country_shuffled).dump(1) << '\n';
    }
    {
        std::ofstream file(config.out_dir / "full_shuffled_summary.json", std::ios::binary);
        file << repetition_summary_to_json(result.full_shuffled).dump(1) << '\n';
    }
    return result;
}

} // namespace surveysim
