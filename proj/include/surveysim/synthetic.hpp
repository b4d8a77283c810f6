#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "surveysim/countries.hpp"
#include "surveysim/errors.hpp"
#include "surveysim/persona.hpp"
#include "surveysim/prompt.hpp"
#include "surveysim/rng.hpp"

namespace surveysim {

// Ground-truth parameters for one outcome of the linear response model:
//   mu = intercept + country_term + d*D + e*E + i*I
//        + ei*EI + de*DE + di*DI + dei*DEI
struct OutcomeParams {
    double intercept = 4.0;
    std::array<double, kCountryCount> country{}; // must sum to zero
    double d = 0.0;
    double e = 0.0;
    double i = 0.0;
    double ei = 0.0;
    double de = 0.0;
    double di = 0.0;
    double dei = 0.0;
};

struct SyntheticRespondentParams {
    OutcomeParams persuasion;
    OutcomeParams mobilization;
    std::map<std::string, double> language_bias; // additive shift per language code
    double noise_sd = 0.0;
    std::uint64_t seed = 0;

    void validate() const {
        for (const OutcomeParams* o : {&persuasion, &mobilization}) {
            double sum = 0.0;
            for (double c : o->country) sum += c;
            if (std::abs(sum) > 1e-9) {
                throw ConfigError("synthetic params: country terms must sum to zero (got " +
                                  std::to_string(sum) + ")");
            }
        }
        if (noise_sd < 0) throw ConfigError("synthetic params: noise sd must be >= 0");
    }
};

// Ties round toward +infinity, so a pre-noise mean of 4.5 yields 5.
inline int round_half_up_rating(double x) {
    return static_cast<int>(std::clamp(std::floor(x + 0.5), 1.0, 7.0));
}

// Pre-noise, pre-rounding mean response. The country term is skipped when the
// respondent cannot see a country (masked prompts).
inline double synthetic_mean(const OutcomeParams& params, std::optional<Country> country, double d,
                             bool e, bool i, double language_bias = 0.0) {
    const double ev = e ? 1.0 : 0.0;
    const double iv = i ? 1.0 : 0.0;
    double mu = params.intercept + params.d * d + params.e * ev + params.i * iv +
                params.ei * ev * iv + params.de * d * ev + params.di * d * iv +
                params.dei * d * ev * iv + language_bias;
    if (country) mu += params.country[static_cast<std::size_t>(*country)];
    return mu;
}

// Seed-deterministic Gaussian noise keyed by (seed, persona, probe), so
// concurrent collection schedules cannot change any value.
inline double synthetic_noise(const SyntheticRespondentParams& params, std::string_view persona_id,
                              ProbeKind probe) {
    if (params.noise_sd == 0.0) return 0.0;
    const std::string key = std::string(persona_id) + "|" + std::string(probe_token(probe));
    SplitMix64 rng(derive_seed(params.seed, key));
    return params.noise_sd * rng.normal();
}

inline const OutcomeParams& params_for(const SyntheticRespondentParams& params, ProbeKind probe) {
    return is_persuasion(probe) ? params.persuasion : params.mobilization;
}

inline double language_bias_for(const SyntheticRespondentParams& params,
                                const std::string& language_code) {
    auto it = params.language_bias.find(language_code);
    return it == params.language_bias.end() ? 0.0 : it->second;
}

// Direct (persona-level) synthetic rating.
inline int synthetic_respond(const Persona& persona, ProbeKind probe,
                             const std::string& language_code,
                             const SyntheticRespondentParams& params) {
    params.validate();
    const double mu = synthetic_mean(params_for(params, probe), persona.country,
                                     persona.mean_deprivation(), persona.framing.anti_elite,
                                     persona.framing.anti_immigrant,
                                     language_bias_for(params, language_code));
    return round_half_up_rating(mu + synthetic_noise(params, persona.id, probe));
}

inline nlohmann::json outcome_params_to_json(const OutcomeParams& o) {
    nlohmann::json country = nlohmann::json::object();
    for (Country c : kCountries) {
        country[std::string(country_code(c))] = o.country[static_cast<std::size_t>(c)];
    }
    return nlohmann::json{{"intercept", o.intercept}, {"country", country}, {"D", o.d},
                          {"E", o.e},                 {"I", o.i},           {"EI", o.ei},
                          {"DE", o.de},               {"DI", o.di},         {"DEI", o.dei}};
}

inline OutcomeParams outcome_params_from_json(const nlohmann::json& j) {
    OutcomeParams o;
    o.intercept = j.value("intercept", 4.0);
    if (j.contains("country")) {
        for (const auto& [code, value] : j.at("country").items()) {
            o.country[static_cast<std::size_t>(require_country(code, "synthetic params"))] =
                value.get<double>();
        }
    }
    o.d = j.value("D", 0.0);
    o.e = j.value("E", 0.0);
    o.i = j.value("I", 0.0);
    o.ei = j.value("EI", 0.0);
    o.de = j.value("DE", 0.0);
    o.di = j.value("DI", 0.0);
    o.dei = j.value("DEI", 0.0);
    return o;
}

inline nlohmann::json synthetic_params_to_json(const SyntheticRespondentParams& p) {
    return nlohmann::json{{"persuasion", outcome_params_to_json(p.persuasion)},
                          {"mobilization", outcome_params_to_json(p.mobilization)},
                          {"language_bias", p.language_bias},
                          {"noise_sd", p.noise_sd},
                          {"seed", p.seed}};
}

inline SyntheticRespondentParams synthetic_params_from_json(const nlohmann::json& j) {
    SyntheticRespondentParams p;
    if (j.contains("persuasion")) p.persuasion = outcome_params_from_json(j.at("persuasion"));
    if (j.contains("mobilization")) p.mobilization = outcome_params_from_json(j.at("mobilization"));
    if (j.contains("language_bias")) {
        p.language_bias = j.at("language_bias").get<std::map<std::string, double>>();
    }
    p.noise_sd = j.value("noise_sd", 0.0);
    p.seed = j.value("seed", std::uint64_t{0});
    p.validate();
    return p;
}

} // namespace surveysim
