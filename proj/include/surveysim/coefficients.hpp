#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "surveysim/countries.hpp"
#include "surveysim/design.hpp"
#include "surveysim/errors.hpp"
#include "surveysim/ols.hpp"

namespace surveysim {

struct CoefficientEstimate {
    double value = 0.0;
    double se = 0.0;

    friend bool operator==(const CoefficientEstimate&, const CoefficientEstimate&) = default;
};

// The framing / deprivation terms, in the row order of the results table.
inline constexpr std::array<std::string_view, 7> kFramingTerms = {"D",   "E",   "I",  "ExI",
                                                                  "DxE", "DxI", "DxExI"};

struct OutcomeCoefficients {
    std::optional<CoefficientEstimate> intercept;
    std::map<Country, CoefficientEstimate> country;
    CoefficientEstimate d, e, i, ei, de, di, dei;

    const CoefficientEstimate& framing_term(std::string_view term) const {
        if (term == "D") return d;
        if (term == "E") return e;
        if (term == "I") return i;
        if (term == "ExI") return ei;
        if (term == "DxE") return de;
        if (term == "DxI") return di;
        if (term == "DxExI") return dei;
        throw std::invalid_argument("unknown framing term '" + std::string(term) + "'");
    }

    CoefficientEstimate& framing_term(std::string_view term) {
        return const_cast<CoefficientEstimate&>(
            static_cast<const OutcomeCoefficients&>(*this).framing_term(term));
    }

    double country_value_sum() const {
        double sum = 0.0;
        for (const auto& [c, est] : country) sum += est.value;
        return sum;
    }
};

struct CoefficientTable {
    OutcomeCoefficients persuasion;
    OutcomeCoefficients mobilization;

    const OutcomeCoefficients& outcome(Outcome o) const {
        return o == Outcome::Persuasion ? persuasion : mobilization;
    }
    OutcomeCoefficients& outcome(Outcome o) {
        return o == Outcome::Persuasion ? persuasion : mobilization;
    }
};

// Flat JSON term keys, e.g. "lambda_EI_P" and "C_at_M"; the canonical order
// is framing terms then countries, persuasion block then mobilization block.
inline std::vector<std::string> coefficient_term_keys() {
    std::vector<std::string> keys;
    for (Outcome o : {Outcome::Persuasion, Outcome::Mobilization}) {
        const std::string suffix = std::string(outcome_suffix(o));
        for (std::string_view term : kFramingTerms) {
            std::string name(term);
            std::size_t pos;
            while ((pos = name.find('x')) != std::string::npos) name.erase(pos, 1);
            keys.push_back("lambda_" + name + "_" + suffix);
        }
        for (Country c : kCountries) {
            keys.push_back("C_" + std::string(country_code(c)) + "_" + suffix);
        }
    }
    return keys;
}

namespace detail {

inline std::string framing_term_key(std::string_view term, Outcome o) {
    std::string name(term);
    std::size_t pos;
    while ((pos = name.find('x')) != std::string::npos) name.erase(pos, 1);
    return "lambda_" + name + "_" + std::string(outcome_suffix(o));
}

} // namespace detail

inline nlohmann::json coefficient_table_to_json(const CoefficientTable& table) {
    nlohmann::json j = nlohmann::json::object();
    for (Outcome o : {Outcome::Persuasion, Outcome::Mobilization}) {
        const OutcomeCoefficients& oc = table.outcome(o);
        const std::string suffix = std::string(outcome_suffix(o));
        if (oc.intercept) {
            j["intercept_" + suffix] = {{"value", oc.intercept->value}, {"se", oc.intercept->se}};
        }
        for (std::string_view term : kFramingTerms) {
            const CoefficientEstimate& est = oc.framing_term(term);
            j[detail::framing_term_key(term, o)] = {{"value", est.value}, {"se", est.se}};
        }
        for (const auto& [c, est] : oc.country) {
            j["C_" + std::string(country_code(c)) + "_" + suffix] = {{"value", est.value},
                                                                     {"se", est.se}};
        }
    }
    return j;
}

inline CoefficientTable coefficient_table_from_json(const nlohmann::json& j) {
    CoefficientTable table;
    std::vector<std::string> missing;
    auto get = [&](const std::string& key) -> CoefficientEstimate {
        if (!j.contains(key)) {
            missing.push_back(key);
            return {};
        }
        const auto& entry = j.at(key);
        return {entry.at("value").get<double>(), entry.at("se").get<double>()};
    };
    for (Outcome o : {Outcome::Persuasion, Outcome::Mobilization}) {
        OutcomeCoefficients& oc = table.outcome(o);
        const std::string suffix = std::string(outcome_suffix(o));
        if (j.contains("intercept_" + suffix)) {
            const auto& entry = j.at("intercept_" + suffix);
            oc.intercept = CoefficientEstimate{entry.at("value").get<double>(),
                                               entry.at("se").get<double>()};
        }
        for (std::string_view term : kFramingTerms) {
            oc.framing_term(term) = get(detail::framing_term_key(term, o));
        }
        for (Country c : kCountries) {
            oc.country[c] = get("C_" + std::string(country_code(c)) + "_" + suffix);
        }
    }
    if (!missing.empty()) {
        std::string message = "coefficient table missing term(s):";
        for (const std::string& key : missing) message += " " + key;
        throw StructuralError(message);
    }
    return table;
}

// Pull each coefficient from the earliest model containing it: countries and
// D, E, I from model A; EI, DE, DI from model B; DEI from model C. The fits
// are identified by their column sets, so argument order does not matter.
// The dropped contrast level's effect is -sum(contrasts) with its standard
// error propagated through the contrast covariance block.
inline OutcomeCoefficients extract_coefficients(const OlsFit& fit1, const OlsFit& fit2,
                                                const OlsFit& fit3,
                                                const std::vector<Country>& countries) {
    const OlsFit* model_a = nullptr;
    const OlsFit* model_b = nullptr;
    const OlsFit* model_c = nullptr;
    for (const OlsFit* fit : {&fit1, &fit2, &fit3}) {
        if (fit->has_column("DxExI")) {
            model_c = fit;
        } else if (fit->has_column("ExI")) {
            model_b = fit;
        } else {
            model_a = fit;
        }
    }
    if (model_a == nullptr || model_b == nullptr || model_c == nullptr) {
        throw std::invalid_argument(
            "extract_coefficients: expected one fit each of models A, B and C");
    }
    if (model_a->n != model_b->n || model_a->n != model_c->n) {
        throw std::invalid_argument("extract_coefficients: fits disagree on sample size");
    }

    auto estimate = [](const OlsFit& fit, const std::string& label) {
        const Eigen::Index j = fit.column(label);
        return CoefficientEstimate{fit.coefficients(j), fit.standard_errors(j)};
    };

    OutcomeCoefficients out;
    out.intercept = estimate(*model_a, "intercept");
    out.d = estimate(*model_a, "D");
    out.e = estimate(*model_a, "E");
    out.i = estimate(*model_a, "I");
    out.ei = estimate(*model_b, "ExI");
    out.de = estimate(*model_b, "DxE");
    out.di = estimate(*model_b, "DxI");
    out.dei = estimate(*model_c, "DxExI");

    const std::size_t n_contrast = countries.size() - 1;
    double dropped_value = 0.0;
    double dropped_variance = 0.0;
    std::vector<Eigen::Index> contrast_columns;
    contrast_columns.reserve(n_contrast);
    for (std::size_t j = 0; j < n_contrast; ++j) {
        const std::string label = "C_" + std::string(country_code(countries[j]));
        const Eigen::Index col = model_a->column(label);
        contrast_columns.push_back(col);
        out.country[countries[j]] = estimate(*model_a, label);
        dropped_value -= model_a->coefficients(col);
    }
    for (Eigen::Index a : contrast_columns) {
        for (Eigen::Index b : contrast_columns) {
            dropped_variance += model_a->covariance(a, b);
        }
    }
    out.country[countries.back()] =
        CoefficientEstimate{dropped_value, std::sqrt(std::max(0.0, dropped_variance))};
    return out;
}

} // namespace surveysim
