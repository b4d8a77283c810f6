#pragma once

#include <algorithm>
#include <array>
#include <string>
#include <string_view>

#include "surveysim/catalog.hpp"
#include "surveysim/errors.hpp"
#include "surveysim/persona.hpp"

namespace surveysim {

// The five post-article probes: two persuasion, three mobilization.
enum class ProbeKind { Persuasion1, Persuasion2, Mobilization1, Mobilization2, Mobilization3 };

inline constexpr std::array<ProbeKind, 5> kAllProbes = {
    ProbeKind::Persuasion1, ProbeKind::Persuasion2, ProbeKind::Mobilization1,
    ProbeKind::Mobilization2, ProbeKind::Mobilization3};

constexpr bool is_persuasion(ProbeKind probe) {
    return probe == ProbeKind::Persuasion1 || probe == ProbeKind::Persuasion2;
}

constexpr std::string_view probe_token(ProbeKind probe) {
    switch (probe) {
        case ProbeKind::Persuasion1: return "P1";
        case ProbeKind::Persuasion2: return "P2";
        case ProbeKind::Mobilization1: return "M1";
        case ProbeKind::Mobilization2: return "M2";
        case ProbeKind::Mobilization3: return "M3";
    }
    return "P1";
}

inline ProbeKind probe_from_token(std::string_view token, std::string_view context) {
    for (ProbeKind p : kAllProbes) {
        if (probe_token(p) == token) return p;
    }
    throw ParseError(std::string(context) + ": unknown probe '" + std::string(token) + "'");
}

struct RenderedPrompt {
    std::string text;
    std::string persona_id;
    ProbeKind probe = ProbeKind::Persuasion1;
    std::string language_code;
    bool masked = false;
    FramingCondition framing;
};

// (E, I) -> article template key, a bijection onto the four versions.
inline std::string select_article(FramingCondition framing) {
    if (framing.anti_elite && framing.anti_immigrant) return std::string(kArticleCombined);
    if (framing.anti_elite) return std::string(kArticleAntiElite);
    if (framing.anti_immigrant) return std::string(kArticleAntiImmigrant);
    return std::string(kArticleFactual);
}

namespace detail {

inline void replace_all(std::string& text, std::string_view needle, std::string_view value) {
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        text.replace(pos, needle.size(), value);
        pos += value.size();
    }
}

// Expand an article template: drop optional spans when masked, otherwise keep
// their contents and substitute the nationality placeholders.
inline std::string expand_article(const std::string& tmpl, bool masked,
                                  const std::string& country_name, const std::string& demonym) {
    std::string out;
    out.reserve(tmpl.size());
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        const std::size_t open = tmpl.find(kSpanOpen, pos);
        if (open == std::string::npos) {
            out.append(tmpl, pos, std::string::npos);
            break;
        }
        out.append(tmpl, pos, open - pos);
        const std::size_t close = tmpl.find(kSpanClose, open);
        // validate_catalog guarantees balanced spans
        const std::size_t content_begin = open + kSpanOpen.size();
        if (!masked) out.append(tmpl, content_begin, close - content_begin);
        pos = close + kSpanClose.size();
    }
    if (!masked) {
        replace_all(out, kPlaceholderCountry, country_name);
        replace_all(out, kPlaceholderNationals, demonym);
    }
    return out;
}

} // namespace detail

// Render the semi-complete questionnaire for one persona and one probe:
// demographics, deprivation ratings, the framing-selected article, then the
// final instruction with the probe statement and an empty rating line.
inline RenderedPrompt render_prompt(const Persona& persona, const LanguageCatalog& catalog,
                                    ProbeKind probe, bool mask_nationality) {
    validate_persona(persona, "render_prompt");
    if (persona.deprivation_ratings.size() > catalog.deprivation_statements.size()) {
        throw RenderError("catalog " + catalog.language_code + " has " +
                          std::to_string(catalog.deprivation_statements.size()) +
                          " deprivation statements but persona " + persona.id + " carries " +
                          std::to_string(persona.deprivation_ratings.size()) + " ratings");
    }
    if (!mask_nationality &&
        !catalog.strings.contains("country_name." + std::string(country_code(persona.country)))) {
        throw RenderError("catalog " + catalog.language_code + " has no lexicon entry for country " +
                          std::string(country_code(persona.country)));
    }

    const char nl = '\n';
    std::string text;
    text.reserve(4096);

    text += catalog.str("survey_title");
    text += nl;
    text += nl;
    text += catalog.str("section_demographics");
    text += nl;
    text += catalog.str("label_age") + ": " + std::to_string(persona.age);
    text += nl;
    const char* gender_key = persona.gender == Gender::Female  ? "gender_female"
                             : persona.gender == Gender::Male ? "gender_male"
                                                              : "gender_other";
    text += catalog.str("label_gender") + ": " + catalog.str(gender_key);
    text += nl;
    text += catalog.str("label_education") + ": " + std::to_string(persona.education);
    text += nl;
    if (!mask_nationality) {
        text += catalog.str("label_country") + ": " + catalog.country_name(persona.country);
        text += nl;
    }
    text += nl;

    text += catalog.str("section_deprivation");
    text += nl;
    text += catalog.str("deprivation_scale_instruction");
    text += nl;
    for (std::size_t i = 0; i < persona.deprivation_ratings.size(); ++i) {
        text += nl;
        text += catalog.str("statement_prefix") + " " + catalog.deprivation_statements[i];
        text += nl;
        text += catalog.str("rating_prefix") + " " + std::to_string(persona.deprivation_ratings[i]);
        text += nl;
    }
    text += nl;

    text += catalog.str("section_article");
    text += nl;
    text += "[" + catalog.str("photo_label") + ": " + catalog.photo_alt_text + "]";
    text += nl;
    const std::string article_key = select_article(persona.framing);
    const std::string& tmpl = catalog.article_templates.at(article_key);
    const bool unmasked = !mask_nationality;
    text += detail::expand_article(tmpl, mask_nationality,
                                   unmasked ? catalog.country_name(persona.country) : std::string(),
                                   unmasked ? catalog.demonym(persona.country) : std::string());
    text += nl;
    text += nl;

    text += catalog.str("section_response");
    text += nl;
    text += catalog.str("final_instruction");
    text += nl;
    text += nl;
    const auto probe_index = static_cast<std::size_t>(
        std::find(kAllProbes.begin(), kAllProbes.end(), probe) - kAllProbes.begin());
    text += catalog.str("statement_prefix") + " " + catalog.probe_statements[probe_index];
    text += nl;
    text += catalog.str("rating_prefix");

    RenderedPrompt prompt;
    prompt.text = std::move(text);
    prompt.persona_id = persona.id;
    prompt.probe = probe;
    prompt.language_code = catalog.language_code;
    prompt.masked = mask_nationality;
    prompt.framing = persona.framing;
    return prompt;
}

} // namespace surveysim
