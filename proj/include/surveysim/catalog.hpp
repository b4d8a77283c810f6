#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "surveysim/countries.hpp"
#include "surveysim/errors.hpp"

namespace surveysim {

// Optional-span delimiters used in article templates. Text between them is
// kept (with placeholders substituted) when nationality is unmasked and
// dropped wholesale when it is masked.
inline constexpr std::string_view kSpanOpen = "⟦";  // U+27E6
inline constexpr std::string_view kSpanClose = "⟧"; // U+27E7

inline constexpr std::string_view kPlaceholderNationals = "[nationals]";
inline constexpr std::string_view kPlaceholderCountry = "[country]";

// Article template keys, one per framing condition.
inline constexpr std::string_view kArticleFactual = "factual";
inline constexpr std::string_view kArticleAntiElite = "anti_elite";
inline constexpr std::string_view kArticleAntiImmigrant = "anti_immigrant";
inline constexpr std::string_view kArticleCombined = "combined";

// String-table keys every catalog must provide, beyond the per-country
// lexicon entries ("country_name.<code>" / "demonym.<code>").
inline const std::vector<std::string>& required_string_keys() {
    static const std::vector<std::string> keys = {
        "survey_title",
        "section_demographics",
        "label_age",
        "label_gender",
        "label_education",
        "label_country",
        "gender_female",
        "gender_male",
        "gender_other",
        "section_deprivation",
        "deprivation_scale_instruction",
        "statement_prefix",
        "rating_prefix",
        "section_article",
        "photo_label",
        "section_response",
        "final_instruction",
    };
    return keys;
}

struct LanguageCatalog {
    std::string language_code;
    std::map<std::string, std::string> strings;
    std::map<std::string, std::string> article_templates;
    std::vector<std::string> probe_statements;       // P1, P2, M1, M2, M3
    std::vector<std::string> deprivation_statements;
    std::string photo_alt_text;
    std::string translation_status; // empty, or e.g. "machine-translated, unvetted"

    const std::string& str(const std::string& key) const {
        auto it = strings.find(key);
        if (it == strings.end()) {
            throw ValidationError("catalog " + language_code + ": missing string '" + key + "'");
        }
        return it->second;
    }

    const std::string& country_name(Country c) const {
        return str("country_name." + std::string(country_code(c)));
    }

    const std::string& demonym(Country c) const {
        return str("demonym." + std::string(country_code(c)));
    }
};

namespace detail {

// Every placeholder must sit inside a well-formed, non-nested optional span,
// otherwise masked rendering would leave placeholder text behind.
inline void check_template_spans(const std::string& key, const std::string& text,
                                 std::vector<std::string>& problems) {
    std::size_t pos = 0;
    bool open = false;
    std::size_t span_start = 0;
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    while (pos < text.size()) {
        if (text.compare(pos, kSpanOpen.size(), kSpanOpen) == 0) {
            if (open) {
                problems.push_back("article_templates." + key + ": nested optional span");
                return;
            }
            open = true;
            span_start = pos;
            pos += kSpanOpen.size();
        } else if (text.compare(pos, kSpanClose.size(), kSpanClose) == 0) {
            if (!open) {
                problems.push_back("article_templates." + key + ": unmatched span close");
                return;
            }
            open = false;
            spans.emplace_back(span_start, pos + kSpanClose.size());
            pos += kSpanClose.size();
        } else {
            ++pos;
        }
    }
    if (open) {
        problems.push_back("article_templates." + key + ": unterminated optional span");
        return;
    }
    for (std::string_view placeholder : {kPlaceholderNationals, kPlaceholderCountry}) {
        std::size_t at = text.find(placeholder);
        while (at != std::string::npos) {
            bool covered = false;
            for (const auto& [lo, hi] : spans) {
                if (at >= lo && at + placeholder.size() <= hi) {
                    covered = true;
                    break;
                }
            }
            if (!covered) {
                problems.push_back("article_templates." + key + ": placeholder " +
                                   std::string(placeholder) + " outside optional span");
            }
            at = text.find(placeholder, at + 1);
        }
    }
}

} // namespace detail

// Full schema validation; collects every problem before throwing so a bad
// catalog is reported in one pass.
inline void validate_catalog(const LanguageCatalog& catalog) {
    std::vector<std::string> problems;

    if (catalog.language_code.empty()) {
        problems.push_back("language_code: missing or empty");
    }

    for (const std::string& key : required_string_keys()) {
        if (!catalog.strings.contains(key)) problems.push_back("strings." + key + ": missing");
    }
    for (Country c : kCountries) {
        for (std::string_view prefix : {"country_name.", "demonym."}) {
            const std::string key = std::string(prefix) + std::string(country_code(c));
            if (!catalog.strings.contains(key)) problems.push_back("strings." + key + ": missing");
        }
    }

    const std::array<std::string_view, 4> article_keys = {
        kArticleFactual, kArticleAntiElite, kArticleAntiImmigrant, kArticleCombined};
    for (std::string_view key : article_keys) {
        auto it = catalog.article_templates.find(std::string(key));
        if (it == catalog.article_templates.end()) {
            problems.push_back("article_templates." + std::string(key) + ": missing");
            continue;
        }
        const std::string& text = it->second;
        const bool populist = key != kArticleFactual;
        for (std::string_view placeholder : {kPlaceholderNationals, kPlaceholderCountry}) {
            const bool present = text.find(placeholder) != std::string::npos;
            if (populist && !present) {
                problems.push_back("article_templates." + std::string(key) + ": missing placeholder " +
                                   std::string(placeholder));
            }
            if (!populist && present) {
                problems.push_back("article_templates." + std::string(key) +
                                   ": factual template must not contain " + std::string(placeholder));
            }
        }
        detail::check_template_spans(std::string(key), text, problems);
    }

    if (catalog.probe_statements.size() != 5) {
        problems.push_back("probe_statements: expected 5 entries, found " +
                           std::to_string(catalog.probe_statements.size()));
    }
    if (catalog.deprivation_statements.empty()) {
        problems.push_back("deprivation_statements: must be non-empty");
    }
    if (catalog.photo_alt_text.empty()) {
        problems.push_back("photo_alt_text: missing or empty");
    }

    if (!problems.empty()) {
        std::string message = "catalog validation failed (" + catalog.language_code + "):";
        for (const std::string& p : problems) {
            message += "\n  - " + p;
        }
        throw ValidationError(message);
    }
}

inline LanguageCatalog catalog_from_json(const nlohmann::json& j, const std::string& name) {
    LanguageCatalog catalog;
    try {
        catalog.language_code = j.value("language_code", std::string());
        if (j.contains("strings")) {
            for (const auto& [key, value] : j.at("strings").items()) {
                catalog.strings[key] = value.get<std::string>();
            }
        }
        if (j.contains("article_templates")) {
            for (const auto& [key, value] : j.at("article_templates").items()) {
                catalog.article_templates[key] = value.get<std::string>();
            }
        }
        if (j.contains("probe_statements")) {
            catalog.probe_statements = j.at("probe_statements").get<std::vector<std::string>>();
        }
        if (j.contains("deprivation_statements")) {
            catalog.deprivation_statements =
                j.at("deprivation_statements").get<std::vector<std::string>>();
        }
        catalog.photo_alt_text = j.value("photo_alt_text", std::string());
        catalog.translation_status = j.value("translation_status", std::string());
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(name + ": " + e.what());
    }
    validate_catalog(catalog);
    return catalog;
}

inline LanguageCatalog load_catalog(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot open catalog " + path.string());
    nlohmann::json j = nlohmann::json::parse(file, nullptr, false);
    if (j.is_discarded()) throw ValidationError(path.string() + ": invalid JSON");
    return catalog_from_json(j, path.filename().string());
}

// Catalogs keyed by language code.
using CatalogSet = std::map<std::string, LanguageCatalog>;

inline CatalogSet load_catalog_dir(const std::filesystem::path& dir) {
    CatalogSet set;
    if (!std::filesystem::is_directory(dir)) {
        throw ConfigError("catalog directory not found: " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        LanguageCatalog catalog = load_catalog(path);
        set[catalog.language_code] = std::move(catalog);
    }
    return set;
}

inline const LanguageCatalog& require_catalog(const CatalogSet& set, const std::string& code) {
    auto it = set.find(code);
    if (it == set.end()) throw ConfigError("no catalog loaded for language " + code);
    return it->second;
}

} // namespace surveysim
