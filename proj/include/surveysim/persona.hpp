#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "surveysim/countries.hpp"
#include "surveysim/errors.hpp"
#include "surveysim/rng.hpp"

namespace surveysim {

// Which article version the participant sees: (E, I) booleans select the
// factual, anti-elite, anti-immigrant or combined framing.
struct FramingCondition {
    bool anti_elite = false;
    bool anti_immigrant = false;

    friend auto operator<=>(const FramingCondition&, const FramingCondition&) = default;
};

inline constexpr std::array<FramingCondition, 4> kAllFramings = {{
    {false, false}, {true, false}, {false, true}, {true, true}}};

enum class Gender { Female, Male, Other };

inline std::string_view gender_token(Gender g) {
    switch (g) {
        case Gender::Female: return "female";
        case Gender::Male: return "male";
        case Gender::Other: return "other";
    }
    return "other";
}

inline Gender gender_from_token(std::string_view s, std::string_view context) {
    if (s == "female") return Gender::Female;
    if (s == "male") return Gender::Male;
    if (s == "other") return Gender::Other;
    throw ParseError(std::string(context) + ": unknown gender '" + std::string(s) + "'");
}

struct Persona {
    std::string id;
    Country country = Country::Austria;
    int age = 18;
    Gender gender = Gender::Female;
    int education = 1; // ordinal 1..7
    std::vector<int> deprivation_ratings;
    FramingCondition framing;

    // The covariate D: mean of the 1-7 deprivation ratings.
    double mean_deprivation() const {
        return std::accumulate(deprivation_ratings.begin(), deprivation_ratings.end(), 0.0) /
               static_cast<double>(deprivation_ratings.size());
    }

    friend bool operator==(const Persona&, const Persona&) = default;
};

struct AgeRange {
    int min = 18;
    int max = 75;
};

struct GenderWeights {
    double female = 0.495;
    double male = 0.495;
    double other = 0.01;
};

struct EducationRange {
    int min = 1;
    int max = 7;
};

// Deprivation items are drawn as round(N(mean, sd)) clamped to 1..7.
struct DeprivationDistribution {
    double mean = 4.0;
    double sd = 1.5;
};

struct PopulationSpec {
    std::map<Country, int> per_country_counts;
    int deprivation_item_count = 3;
    AgeRange age;
    GenderWeights gender;
    EducationRange education;
    DeprivationDistribution deprivation;
    std::uint64_t seed = 0;

    // Full study composition (7286 participants across 15 countries).
    static PopulationSpec defaults(std::uint64_t seed = 0) {
        PopulationSpec spec;
        for (Country c : kCountries) spec.per_country_counts[c] = country_participant_count(c);
        spec.seed = seed;
        return spec;
    }

    // ~10% of the study composition per country, for CI and desk checks.
    static PopulationSpec desk_scale(std::uint64_t seed = 0) {
        PopulationSpec spec;
        for (Country c : kCountries) {
            spec.per_country_counts[c] =
                std::max(1, (country_participant_count(c) + 5) / 10);
        }
        spec.seed = seed;
        return spec;
    }

    int total_count() const {
        int total = 0;
        for (const auto& [c, n] : per_country_counts) total += n;
        return total;
    }

    void validate() const {
        if (per_country_counts.empty()) throw ConfigError("population spec: no countries");
        for (const auto& [c, n] : per_country_counts) {
            if (n <= 0) {
                throw ConfigError("population spec: non-positive count for " +
                                  std::string(country_code(c)));
            }
        }
        if (deprivation_item_count < 1) {
            throw ConfigError("population spec: deprivation_item_count must be >= 1");
        }
        if (age.min < 18 || age.max > 90 || age.min > age.max) {
            throw ConfigError("population spec: age range must lie within [18, 90]");
        }
        if (education.min < 1 || education.max > 7 || education.min > education.max) {
            throw ConfigError("population spec: education range must lie within [1, 7]");
        }
        if (gender.female < 0 || gender.male < 0 || gender.other < 0 ||
            gender.female + gender.male + gender.other <= 0) {
            throw ConfigError("population spec: gender weights must be non-negative, sum > 0");
        }
        if (deprivation.sd < 0) throw ConfigError("population spec: deprivation sd must be >= 0");
    }
};

namespace detail {

inline int sample_deprivation_item(SplitMix64& rng, const DeprivationDistribution& d) {
    const double x = d.mean + d.sd * rng.normal();
    return static_cast<int>(std::clamp(std::floor(x + 0.5), 1.0, 7.0));
}

inline Gender sample_gender(SplitMix64& rng, const GenderWeights& w) {
    const double total = w.female + w.male + w.other;
    const double u = rng.unit() * total;
    if (u <= w.female) return Gender::Female;
    if (u <= w.female + w.male) return Gender::Male;
    return Gender::Other;
}

} // namespace detail

// Build the simulated participant population. Countries are processed in
// enum order with one derived RNG stream each, so adding or resizing one
// country leaves the others' draws untouched.
inline std::vector<Persona> synthesize_population(const PopulationSpec& spec) {
    spec.validate();
    std::vector<Persona> out;
    out.reserve(static_cast<std::size_t>(spec.total_count()));
    for (const auto& [country, count] : spec.per_country_counts) {
        SplitMix64 rng(derive_seed(spec.seed, "persona", static_cast<std::uint64_t>(country)));
        for (int i = 0; i < count; ++i) {
            Persona p;
            {
                std::ostringstream id;
                id << country_code(country) << "-";
                id.width(4);
                id.fill('0');
                id << (i + 1);
                p.id = id.str();
            }
            p.country = country;
            p.age = spec.age.min + static_cast<int>(rng.below(
                        static_cast<std::uint64_t>(spec.age.max - spec.age.min + 1)));
            p.gender = detail::sample_gender(rng, spec.gender);
            p.education = spec.education.min + static_cast<int>(rng.below(
                              static_cast<std::uint64_t>(spec.education.max - spec.education.min + 1)));
            p.deprivation_ratings.resize(static_cast<std::size_t>(spec.deprivation_item_count));
            for (int& r : p.deprivation_ratings) {
                r = detail::sample_deprivation_item(rng, spec.deprivation);
            }
            out.push_back(std::move(p));
        }
    }
    return out;
}

// Assign the four framing conditions, stratified by country: within every
// country the condition counts differ by at most one, and the leftover
// (count % 4) slots rotate through a seeded global order so the worldwide
// totals are also as equal as integer division allows.
inline std::vector<Persona> assign_framing(std::vector<Persona> personas, std::uint64_t seed) {
    if (personas.empty()) return personas;

    std::map<Country, std::vector<std::size_t>> by_country;
    for (std::size_t i = 0; i < personas.size(); ++i) {
        by_country[personas[i].country].push_back(i);
    }

    std::vector<FramingCondition> rotation(kAllFramings.begin(), kAllFramings.end());
    SplitMix64 rotation_rng(derive_seed(seed, "framing-rotation"));
    deterministic_shuffle(rotation, rotation_rng);
    std::size_t rotation_pos = 0;

    for (auto& [country, indices] : by_country) {
        const std::size_t n = indices.size();
        std::vector<FramingCondition> slots;
        slots.reserve(n);
        for (const FramingCondition& f : kAllFramings) {
            for (std::size_t k = 0; k < n / 4; ++k) slots.push_back(f);
        }
        for (std::size_t k = 0; k < n % 4; ++k) {
            slots.push_back(rotation[rotation_pos % rotation.size()]);
            ++rotation_pos;
        }
        SplitMix64 rng(derive_seed(seed, "framing", static_cast<std::uint64_t>(country)));
        deterministic_shuffle(slots, rng);
        for (std::size_t k = 0; k < n; ++k) {
            personas[indices[k]].framing = slots[k];
        }
    }
    return personas;
}

inline void validate_persona(const Persona& p, std::string_view context) {
    if (p.id.empty()) throw ParseError(std::string(context) + ": empty persona id");
    if (p.age < 18 || p.age > 90) {
        throw ParseError(std::string(context) + ": age " + std::to_string(p.age) +
                         " outside [18, 90]");
    }
    if (p.education < 1 || p.education > 7) {
        throw ParseError(std::string(context) + ": education " + std::to_string(p.education) +
                         " outside [1, 7]");
    }
    if (p.deprivation_ratings.empty()) {
        throw ParseError(std::string(context) + ": deprivation_ratings empty");
    }
    for (int r : p.deprivation_ratings) {
        if (r < 1 || r > 7) {
            throw ParseError(std::string(context) + ": deprivation rating " + std::to_string(r) +
                             " outside [1, 7]");
        }
    }
}

inline nlohmann::json persona_to_json(const Persona& p) {
    return nlohmann::json{
        {"v", 1},
        {"id", p.id},
        {"country", std::string(country_code(p.country))},
        {"age", p.age},
        {"gender", std::string(gender_token(p.gender))},
        {"education", p.education},
        {"deprivation_ratings", p.deprivation_ratings},
        {"framing", {{"E", p.framing.anti_elite}, {"I", p.framing.anti_immigrant}}},
    };
}

inline Persona persona_from_json(const nlohmann::json& j, std::string_view context) {
    Persona p;
    try {
        p.id = j.at("id").get<std::string>();
        p.country = require_country(j.at("country").get<std::string>(), context);
        p.age = j.at("age").get<int>();
        p.gender = gender_from_token(j.at("gender").get<std::string>(), context);
        p.education = j.at("education").get<int>();
        p.deprivation_ratings = j.at("deprivation_ratings").get<std::vector<int>>();
        const auto& framing = j.at("framing");
        p.framing.anti_elite = framing.at("E").get<bool>();
        p.framing.anti_immigrant = framing.at("I").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string(context) + ": " + e.what());
    }
    validate_persona(p, context);
    return p;
}

// JSON-lines population file, one persona per line, schema version 1.
inline std::string serialize_population(const std::vector<Persona>& personas) {
    std::string out;
    for (const Persona& p : personas) {
        out += persona_to_json(p).dump();
        out += '\n';
    }
    return out;
}

inline void save_population(const std::vector<Persona>& personas,
                            const std::filesystem::path& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot open " + path.string() + " for writing");
    file << serialize_population(personas);
    if (!file) throw ConfigError("failed writing " + path.string());
}

inline std::vector<Persona> parse_population(std::istream& in, const std::string& name) {
    std::vector<Persona> out;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        const std::string context = name + ":" + std::to_string(line_number);
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) throw ParseError(context + ": invalid JSON");
        out.push_back(persona_from_json(j, context));
    }
    return out;
}

inline std::vector<Persona> load_population(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot open " + path.string());
    return parse_population(file, path.filename().string());
}

} // namespace surveysim
