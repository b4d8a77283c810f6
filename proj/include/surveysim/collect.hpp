#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "surveysim/backend.hpp"
#include "surveysim/catalog.hpp"
#include "surveysim/errors.hpp"
#include "surveysim/persona.hpp"
#include "surveysim/prompt.hpp"

namespace surveysim {

struct ResponseRecord {
    std::string persona_id;
    ProbeKind probe = ProbeKind::Persuasion1;
    int rating = 1;
    std::string language_code;
    bool masked = false;
    std::string backend_fingerprint;
    std::string raw_text;

    friend bool operator==(const ResponseRecord&, const ResponseRecord&) = default;
};

struct ProbeFailure {
    std::string persona_id;
    ProbeKind probe = ProbeKind::Persuasion1;
    std::string reason;
};

struct CollectionPlan {
    bool mask_nationality = false;
    // Prompting language per persona id; personas absent from the map fail.
    std::unordered_map<std::string, std::string> language_by_persona;
    double max_failure_fraction = 0.05;
    int concurrency = 1;

    static CollectionPlan monolingual(const std::vector<Persona>& personas,
                                      const std::string& language_code, bool mask = false) {
        CollectionPlan plan;
        plan.mask_nationality = mask;
        for (const Persona& p : personas) plan.language_by_persona[p.id] = language_code;
        return plan;
    }
};

struct CollectionResult {
    std::vector<ResponseRecord> records;  // sorted by (persona_id, probe)
    std::vector<ProbeFailure> failures;
};

// Collect the five probe ratings for every persona. Personas may be processed
// concurrently; results land in preallocated slots so the output order is
// independent of scheduling.
inline CollectionResult collect_responses(const std::vector<Persona>& personas,
                                          const CatalogSet& catalogs, const CollectionPlan& plan,
                                          RespondentBackend& backend) {
    const std::string fingerprint = backend.fingerprint();
    const std::size_t n = personas.size();
    std::vector<std::optional<ResponseRecord>> slots(n * kAllProbes.size());
    std::vector<std::optional<ProbeFailure>> failure_slots(n * kAllProbes.size());

    auto work = [&](std::size_t persona_index) {
        const Persona& persona = personas[persona_index];
        auto language_it = plan.language_by_persona.find(persona.id);
        for (std::size_t probe_index = 0; probe_index < kAllProbes.size(); ++probe_index) {
            const ProbeKind probe = kAllProbes[probe_index];
            const std::size_t slot = persona_index * kAllProbes.size() + probe_index;
            try {
                if (language_it == plan.language_by_persona.end()) {
                    throw ConfigError("no language assigned to persona " + persona.id);
                }
                const LanguageCatalog& catalog = require_catalog(catalogs, language_it->second);
                const RenderedPrompt prompt =
                    render_prompt(persona, catalog, probe, plan.mask_nationality);
                ResponseRecord record;
                record.persona_id = persona.id;
                record.probe = probe;
                record.raw_text = backend.complete_text(prompt);
                record.rating = parse_rating(record.raw_text);
                record.language_code = prompt.language_code;
                record.masked = prompt.masked;
                record.backend_fingerprint = fingerprint;
                slots[slot] = std::move(record);
            } catch (const std::exception& e) {
                failure_slots[slot] = ProbeFailure{persona.id, probe, e.what()};
            }
        }
    };

    const int workers = std::max(1, plan.concurrency);
    if (workers == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) work(i);
            });
        }
        for (std::thread& t : pool) t.join();
    }

    CollectionResult result;
    result.records.reserve(slots.size());
    for (auto& slot : slots) {
        if (slot) result.records.push_back(std::move(*slot));
    }
    for (auto& slot : failure_slots) {
        if (slot) result.failures.push_back(std::move(*slot));
    }
    std::sort(result.records.begin(), result.records.end(),
              [](const ResponseRecord& a, const ResponseRecord& b) {
                  if (a.persona_id != b.persona_id) return a.persona_id < b.persona_id;
                  return static_cast<int>(a.probe) < static_cast<int>(b.probe);
              });

    const double total = static_cast<double>(n * kAllProbes.size());
    if (total > 0 && static_cast<double>(result.failures.size()) / total > plan.max_failure_fraction) {
        std::string message = "collection failed for " + std::to_string(result.failures.size()) +
                              " of " + std::to_string(static_cast<std::size_t>(total)) + " probes:";
        const std::size_t shown = std::min<std::size_t>(result.failures.size(), 5);
        for (std::size_t i = 0; i < shown; ++i) {
            const ProbeFailure& f = result.failures[i];
            message += "\n  " + f.persona_id + "/" + std::string(probe_token(f.probe)) + ": " +
                       f.reason;
        }
        throw BackendError(message);
    }
    return result;
}

inline nlohmann::json response_to_json(const ResponseRecord& r) {
    return nlohmann::json{
        {"v", 1},
        {"persona_id", r.persona_id},
        {"probe", std::string(probe_token(r.probe))},
        {"rating", r.rating},
        {"language", r.language_code},
        {"masked", r.masked},
        {"backend", r.backend_fingerprint},
        {"raw", r.raw_text},
    };
}

inline ResponseRecord response_from_json(const nlohmann::json& j, std::string_view context) {
    ResponseRecord r;
    try {
        r.persona_id = j.at("persona_id").get<std::string>();
        r.probe = probe_from_token(j.at("probe").get<std::string>(), context);
        r.rating = j.at("rating").get<int>();
        r.language_code = j.at("language").get<std::string>();
        r.masked = j.at("masked").get<bool>();
        r.backend_fingerprint = j.value("backend", std::string());
        r.raw_text = j.value("raw", std::string());
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string(context) + ": " + e.what());
    }
    if (r.rating < 1 || r.rating > 7) {
        throw ParseError(std::string(context) + ": rating " + std::to_string(r.rating) +
                         " outside [1, 7]");
    }
    return r;
}

inline std::string serialize_responses(const std::vector<ResponseRecord>& records) {
    std::string out;
    for (const ResponseRecord& r : records) {
        out += response_to_json(r).dump();
        out += '\n';
    }
    return out;
}

inline void save_responses(const std::vector<ResponseRecord>& records,
                           const std::filesystem::path& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot open " + path.string() + " for writing");
    file << serialize_responses(records);
}

inline std::vector<ResponseRecord> load_responses(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot open " + path.string());
    std::vector<ResponseRecord> out;
    std::string line;
    int line_number = 0;
    while (std::getline(file, line)) {
        ++line_number;
        if (line.empty()) continue;
        const std::string context = path.filename().string() + ":" + std::to_string(line_number);
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) throw ParseError(context + ": invalid JSON");
        out.push_back(response_from_json(j, context));
    }
    return out;
}

} // namespace surveysim
