#pragma once

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "surveysim/coefficients.hpp"
#include "surveysim/errors.hpp"
#include "surveysim/reference_data.hpp"
#include "surveysim/sha256.hpp"

namespace surveysim {

struct HumanReference {
    CoefficientTable table;
    bool rounded_source = true;
    std::string source;
};

namespace detail {

inline nlohmann::json verified_reference_json() {
    if (sha256_hex(kReferenceJson) != kReferenceChecksum) {
        throw IntegrityError("bundled reference data does not match its checksum");
    }
    return nlohmann::json::parse(kReferenceJson);
}

inline HumanReference load_reference_side(const char* side) {
    const nlohmann::json doc = verified_reference_json();
    HumanReference ref;
    ref.table = coefficient_table_from_json(doc.at(side));
    ref.rounded_source = doc.value("rounded_source", true);
    ref.source = doc.value("source", std::string());
    for (Outcome o : {Outcome::Persuasion, Outcome::Mobilization}) {
        const double sum = ref.table.outcome(o).country_value_sum();
        // Printed rounding admits up to 15 * 0.0005 of drift per outcome.
        if (std::abs(sum) > 0.01) {
            throw IntegrityError("reference country terms do not sum to ~0 for outcome " +
                                 std::string(outcome_suffix(o)));
        }
    }
    return ref;
}

} // namespace detail

// The human study's 44 fitted coefficients.
inline HumanReference load_human_reference() { return detail::load_reference_side("human"); }

// The published simulation run's coefficients for the same 44 terms
// (English prompts, nationality unmasked).
inline HumanReference load_gpt35_reference() { return detail::load_reference_side("gpt35"); }

} // namespace surveysim
