#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "surveysim/coefficients.hpp"
#include "surveysim/countries.hpp"
#include "surveysim/errors.hpp"

namespace surveysim {

// Standard normal CDF via erfc; |error| is a few ulp, far below the 7.5e-8
// budget the analysis tolerates.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / 1.4142135623730950488); }

// Probability that two coefficients share a sign, treating each estimate as
// a Gaussian posterior N(value, se^2):
//   Phi(a/sa) * Phi(b/sb) + Phi(-a/sa) * Phi(-b/sb).
// A zero standard error is a point mass at the estimate.
inline double sign_agreement(CoefficientEstimate a, CoefficientEstimate b) {
    if (a.se < 0 || b.se < 0) throw std::invalid_argument("sign_agreement: negative se");
    auto positive_mass = [](const CoefficientEstimate& c) {
        return c.se > 0 ? normal_cdf(c.value / c.se) : (c.value > 0 ? 1.0 : 0.0);
    };
    auto negative_mass = [](const CoefficientEstimate& c) {
        return c.se > 0 ? normal_cdf(-c.value / c.se) : (c.value < 0 ? 1.0 : 0.0);
    };
    return positive_mass(a) * positive_mass(b) + negative_mass(a) * negative_mass(b);
}

// Pooled agreement for a coefficient subset: the arithmetic mean.
inline double pool_agreements(std::span<const double> probabilities) {
    if (probabilities.empty()) {
        throw std::invalid_argument("pool_agreements: empty probability list");
    }
    double sum = 0.0;
    for (double p : probabilities) {
        if (p < 0.0 || p > 1.0) {
            throw std::invalid_argument("pool_agreements: probability outside [0, 1]");
        }
        sum += p;
    }
    return sum / static_cast<double>(probabilities.size());
}

inline double pool_agreements(const std::vector<double>& probabilities) {
    return pool_agreements(std::span<const double>(probabilities));
}

// Names of the pooled coefficient subsets reported by the analysis.
inline const std::vector<std::string>& pooled_metric_keys() {
    static const std::vector<std::string> keys = {
        "framing_deprivation", "framing_deprivation_P", "framing_deprivation_M",
        "country",             "country_P",             "country_M",
        "all",                 "all_P",                 "all_M",
    };
    return keys;
}

struct PooledRate {
    double rate = 0.0;
    std::optional<double> p_value;
};

struct SignAgreementReport {
    std::map<std::string, double> per_coefficient; // keyed like the coefficient table
    std::map<std::string, PooledRate> pooled;      // keyed by pooled_metric_keys()
    int n_perm = 0;
    // Provenance for charts and summaries.
    std::string mode;
    std::string language_code;
    bool masked = false;

    bool significant(const std::string& metric, double alpha = 0.05) const {
        auto it = pooled.find(metric);
        return it != pooled.end() && it->second.p_value && *it->second.p_value < alpha;
    }
};

// Per-coefficient agreements between a fitted table and a reference table,
// with every pooled subset rate (no permutation p-values yet).
inline SignAgreementReport compute_sign_agreement(const CoefficientTable& fitted,
                                                  const CoefficientTable& reference) {
    SignAgreementReport report;
    std::map<std::string, std::vector<double>> groups;
    for (Outcome o : {Outcome::Persuasion, Outcome::Mobilization}) {
        const OutcomeCoefficients& f = fitted.outcome(o);
        const OutcomeCoefficients& r = reference.outcome(o);
        const std::string suffix = std::string(outcome_suffix(o));
        for (std::string_view term : kFramingTerms) {
            const double a = sign_agreement(f.framing_term(term), r.framing_term(term));
            report.per_coefficient[detail::framing_term_key(term, o)] = a;
            groups["framing_deprivation"].push_back(a);
            groups["framing_deprivation_" + suffix].push_back(a);
            groups["all"].push_back(a);
            groups["all_" + suffix].push_back(a);
        }
        if (f.country.size() != r.country.size()) {
            throw StructuralError("sign agreement: fitted and reference tables cover " +
                                  std::to_string(f.country.size()) + " vs " +
                                  std::to_string(r.country.size()) + " countries");
        }
        for (const auto& [c, est] : f.country) {
            auto it = r.country.find(c);
            if (it == r.country.end()) {
                throw StructuralError("sign agreement: reference table lacks country " +
                                      std::string(country_code(c)));
            }
            const double a = sign_agreement(est, it->second);
            report.per_coefficient["C_" + std::string(country_code(c)) + "_" + suffix] = a;
            groups["country"].push_back(a);
            groups["country_" + suffix].push_back(a);
            groups["all"].push_back(a);
            groups["all_" + suffix].push_back(a);
        }
    }
    for (const std::string& key : pooled_metric_keys()) {
        report.pooled[key] = PooledRate{pool_agreements(groups.at(key)), std::nullopt};
    }
    return report;
}

inline nlohmann::json report_to_json(const SignAgreementReport& report) {
    nlohmann::json pooled = nlohmann::json::object();
    for (const auto& [key, rate] : report.pooled) {
        nlohmann::json entry = {{"rate", rate.rate}};
        if (rate.p_value) entry["p_value"] = *rate.p_value;
        pooled[key] = entry;
    }
    return nlohmann::json{
        {"v", 1},
        {"per_coefficient", report.per_coefficient},
        {"pooled", pooled},
        {"n_perm", report.n_perm},
        {"mode", report.mode},
        {"language", report.language_code},
        {"masked", report.masked},
    };
}

inline SignAgreementReport report_from_json(const nlohmann::json& j) {
    SignAgreementReport report;
    try {
        report.per_coefficient =
            j.at("per_coefficient").get<std::map<std::string, double>>();
        for (const auto& [key, entry] : j.at("pooled").items()) {
            PooledRate rate;
            rate.rate = entry.at("rate").get<double>();
            if (entry.contains("p_value")) rate.p_value = entry.at("p_value").get<double>();
            report.pooled[key] = rate;
        }
        report.n_perm = j.value("n_perm", 0);
        report.mode = j.value("mode", std::string());
        report.language_code = j.value("language", std::string());
        report.masked = j.value("masked", false);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("report: ") + e.what());
    }
    return report;
}

} // namespace surveysim
