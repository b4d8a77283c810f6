#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "surveysim/errors.hpp"

namespace surveysim {

// The 15 surveyed countries, ordered by their two-letter code. This order is
// canonical everywhere: population files, design-matrix country blocks and
// coefficient tables all iterate countries in enum order.
enum class Country : int {
    Austria,
    Switzerland,
    Spain,
    France,
    Germany,
    Greece,
    Ireland,
    Israel,
    Italy,
    Netherlands,
    Norway,
    Poland,
    Romania,
    Sweden,
    UnitedKingdom,
};

inline constexpr std::size_t kCountryCount = 15;

inline constexpr std::array<Country, kCountryCount> kCountries = {
    Country::Austria, Country::Switzerland, Country::Spain,        Country::France,
    Country::Germany, Country::Greece,      Country::Ireland,      Country::Israel,
    Country::Italy,   Country::Netherlands, Country::Norway,       Country::Poland,
    Country::Romania, Country::Sweden,      Country::UnitedKingdom,
};

struct CountryInfo {
    std::string_view code;          // table row id, e.g. "at"
    std::string_view english_name;  // e.g. "Austria"
    std::string_view language_code; // majority language, e.g. "DE"
    int participant_count;          // study sample size
};

inline constexpr std::array<CountryInfo, kCountryCount> kCountryInfo = {{
    {"at", "Austria", "DE", 529},
    {"ch", "Switzerland", "DE", 512},
    {"es", "Spain", "ES", 469},
    {"fr", "France", "FR", 528},
    {"ge", "Germany", "DE", 414},
    {"gr", "Greece", "EL", 548},
    {"ie", "Ireland", "EN", 384},
    {"il", "Israel", "IW", 461},
    {"it", "Italy", "IT", 446},
    {"nl", "Netherlands", "NL", 377},
    {"no", "Norway", "NO", 433},
    {"po", "Poland", "PL", 549},
    {"ro", "Romania", "RO", 659},
    {"se", "Sweden", "SV", 519},
    {"uk", "United Kingdom", "EN", 458},
}};

// The 12 prompting languages (majority languages of the 15 countries).
inline constexpr std::array<std::string_view, 12> kLanguageCodes = {
    "DE", "EL", "EN", "ES", "FR", "IT", "IW", "NL", "NO", "PL", "RO", "SV"};

constexpr const CountryInfo& info(Country c) {
    return kCountryInfo[static_cast<std::size_t>(c)];
}

constexpr std::string_view country_code(Country c) { return info(c).code; }
constexpr std::string_view country_english_name(Country c) { return info(c).english_name; }
constexpr int country_participant_count(Country c) { return info(c).participant_count; }

inline std::optional<Country> country_from_code(std::string_view code) {
    for (std::size_t i = 0; i < kCountryCount; ++i) {
        if (kCountryInfo[i].code == code) return kCountries[i];
    }
    return std::nullopt;
}

inline bool is_known_language(std::string_view code) {
    for (auto l : kLanguageCodes) {
        if (l == code) return true;
    }
    return false;
}

// Appendix country -> majority-language assignment (DE x3, EN x2, ten x1).
inline std::map<Country, std::string> default_country_language_map() {
    std::map<Country, std::string> m;
    for (Country c : kCountries) m[c] = std::string(info(c).language_code);
    return m;
}

inline Country require_country(std::string_view code, std::string_view context) {
    auto c = country_from_code(code);
    if (!c) {
        throw ParseError(std::string(context) + ": unknown country code '" + std::string(code) + "'");
    }
    return *c;
}

} // namespace surveysim
