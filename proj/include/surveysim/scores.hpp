#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "surveysim/collect.hpp"
#include "surveysim/countries.hpp"
#include "surveysim/errors.hpp"
#include "surveysim/persona.hpp"

namespace surveysim {

// One analysis row: persuasion score P (mean of the two persuasion ratings),
// mobilization score M (mean of the three mobilization ratings) and the
// features the models regress on.
struct ScoreRecord {
    std::string persona_id;
    Country country = Country::Austria;
    double d = 0.0; // mean relative deprivation
    bool e = false;
    bool i = false;
    double p = 0.0;
    double m = 0.0;
    std::string language_code;
    bool masked = false;
};

struct ExcludedPersona {
    std::string persona_id;
    std::string reason;
};

struct ScoreResult {
    std::vector<ScoreRecord> scores;
    std::vector<ExcludedPersona> excluded;
};

// Average each persona's ratings into (P, M). A persona missing any of its
// five probes is excluded (averaging over fewer probes would silently change
// the score definition) and reported.
inline ScoreResult compute_scores(const std::vector<ResponseRecord>& records,
                                  const std::vector<Persona>& personas) {
    std::map<std::string, std::map<ProbeKind, const ResponseRecord*>> by_persona;
    for (const ResponseRecord& r : records) {
        auto [it, inserted] = by_persona[r.persona_id].emplace(r.probe, &r);
        if (!inserted) {
            throw ValidationError("duplicate response for persona " + r.persona_id + " probe " +
                                  std::string(probe_token(r.probe)));
        }
    }

    ScoreResult result;
    result.scores.reserve(personas.size());
    for (const Persona& persona : personas) {
        auto it = by_persona.find(persona.id);
        if (it == by_persona.end()) {
            result.excluded.push_back({persona.id, "no responses"});
            continue;
        }
        const auto& probes = it->second;
        if (probes.size() != kAllProbes.size()) {
            std::string missing;
            for (ProbeKind p : kAllProbes) {
                if (!probes.contains(p)) {
                    if (!missing.empty()) missing += ",";
                    missing += std::string(probe_token(p));
                }
            }
            result.excluded.push_back({persona.id, "missing probes: " + missing});
            continue;
        }
        ScoreRecord s;
        s.persona_id = persona.id;
        s.country = persona.country;
        s.d = persona.mean_deprivation();
        s.e = persona.framing.anti_elite;
        s.i = persona.framing.anti_immigrant;
        s.p = (probes.at(ProbeKind::Persuasion1)->rating +
               probes.at(ProbeKind::Persuasion2)->rating) /
              2.0;
        s.m = (probes.at(ProbeKind::Mobilization1)->rating +
               probes.at(ProbeKind::Mobilization2)->rating +
               probes.at(ProbeKind::Mobilization3)->rating) /
              3.0;
        const ResponseRecord* first = probes.begin()->second;
        s.language_code = first->language_code;
        s.masked = first->masked;
        result.scores.push_back(std::move(s));
    }
    return result;
}

namespace detail {

// Shortest round-trip decimal representation.
inline std::string format_double(double x) {
    char buffer[40];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buffer, sizeof(buffer), "%.*g", precision, x);
        if (std::strtod(buffer, nullptr) == x) break;
    }
    return buffer;
}

} // namespace detail

inline std::string serialize_scores_csv(const std::vector<ScoreRecord>& scores) {
    std::string out = "persona_id,country,D,E,I,P,M,language,masked\n";
    for (const ScoreRecord& s : scores) {
        out += s.persona_id;
        out += ',';
        out += std::string(country_code(s.country));
        out += ',';
        out += detail::format_double(s.d);
        out += ',';
        out += s.e ? '1' : '0';
        out += ',';
        out += s.i ? '1' : '0';
        out += ',';
        out += detail::format_double(s.p);
        out += ',';
        out += detail::format_double(s.m);
        out += ',';
        out += s.language_code;
        out += ',';
        out += s.masked ? '1' : '0';
        out += '\n';
    }
    return out;
}

inline void save_scores_csv(const std::vector<ScoreRecord>& scores,
                            const std::filesystem::path& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot open " + path.string() + " for writing");
    file << serialize_scores_csv(scores);
}

} // namespace surveysim
