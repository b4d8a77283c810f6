#include <catch2/catch_amalgamated.hpp>

#include "surveysim/permutation.hpp"
#include "surveysim/rng.hpp"

using namespace surveysim;

namespace {

// Null scores: responses carry no relationship to the features.
std::vector<ScoreRecord> null_scores(int per_country, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<ScoreRecord> scores;
    int serial = 0;
    for (Country c : kCountries) {
        for (int k = 0; k < per_country; ++k) {
            ScoreRecord s;
            s.persona_id = std::string(country_code(c)) + "-" + std::to_string(serial++);
            s.country = c;
            s.d = 1.0 + static_cast<double>(rng.below(7));
            s.e = rng.below(2) == 1;
            s.i = rng.below(2) == 1;
            s.p = 4.0 + rng.normal();
            s.m = 4.0 + rng.normal();
            scores.push_back(std::move(s));
        }
    }
    return scores;
}

// A reference table with confident, mixed-sign entries.
CoefficientTable confident_reference(std::uint64_t seed) {
    SplitMix64 rng(seed);
    CoefficientTable table;
    for (OutcomeCoefficients* oc : {&table.persuasion, &table.mobilization}) {
        for (std::string_view term : kFramingTerms) {
            oc->framing_term(term) = {rng.below(2) ? 0.5 : -0.5, 0.01};
        }
        double sum = 0;
        for (Country c : kCountries) {
            const double v = rng.below(2) ? 0.3 : -0.3;
            oc->country[c] = {v, 0.01};
            sum += v;
        }
        // Re-center so the reference satisfies the sum-to-zero invariant.
        for (Country c : kCountries) oc->country[c].value -= sum / 15.0;
    }
    return table;
}

} // namespace

TEST_CASE("too few permutations are rejected", "[permutation]") {
    const auto scores = null_scores(6, 1);
    REQUIRE_THROWS_AS(
        permutation_significance(scores, confident_reference(2), "all", 50, 1),
        std::invalid_argument);
    REQUIRE_THROWS_AS(
        permutation_significance(scores, confident_reference(2), "nonsense", 199, 1),
        std::invalid_argument);
}

TEST_CASE("analysis is deterministic under a fixed seed", "[permutation]") {
    const auto scores = null_scores(8, 3);
    const auto reference = confident_reference(4);
    const AnalysisResult a = analyze_scores(scores, reference, {99, 42});
    const AnalysisResult b = analyze_scores(scores, reference, {99, 42});
    for (const std::string& key : pooled_metric_keys()) {
        REQUIRE(a.report.pooled.at(key).rate == b.report.pooled.at(key).rate);
        REQUIRE(*a.report.pooled.at(key).p_value == *b.report.pooled.at(key).p_value);
    }
    REQUIRE(a.report.n_perm == 99);
}

TEST_CASE("a signal the reference knows about is significant", "[permutation]") {
    // Give the responses a strong, feature-driven structure matching the
    // reference signs; the permutation null must then look much worse.
    SplitMix64 rng(9);
    auto scores = null_scores(12, 5);
    CoefficientTable reference = confident_reference(6);
    for (ScoreRecord& s : scores) {
        const double ev = s.e ? 1 : 0;
        const double iv = s.i ? 1 : 0;
        s.p += reference.persuasion.country.at(s.country).value +
               reference.persuasion.framing_term("D").value * s.d +
               reference.persuasion.framing_term("E").value * ev +
               reference.persuasion.framing_term("I").value * iv;
        s.m += reference.mobilization.country.at(s.country).value +
               reference.mobilization.framing_term("D").value * s.d +
               reference.mobilization.framing_term("E").value * ev +
               reference.mobilization.framing_term("I").value * iv;
    }
    const double p = permutation_significance(scores, reference, "all", 199, 7);
    CHECK(p <= 0.01);
    // With 199 permutations and the add-one rule the floor is 1/200.
    CHECK(p >= 1.0 / 200.0 - 1e-12);
}

TEST_CASE("null data yields unremarkable p-values most of the time", "[permutation]") {
    const auto reference = confident_reference(11);
    int non_significant = 0;
    const int replicates = 10;
    for (int rep = 0; rep < replicates; ++rep) {
        const auto scores = null_scores(6, 100 + static_cast<std::uint64_t>(rep));
        const double p = permutation_significance(scores, reference, "all", 99,
                                                  static_cast<std::uint64_t>(rep));
        if (p >= 0.05) ++non_significant;
    }
    CHECK(non_significant >= 8);
}

TEST_CASE("permuted fits leave the observed table untouched", "[permutation]") {
    const auto scores = null_scores(8, 21);
    const auto reference = confident_reference(22);
    const AnalysisResult with_few = analyze_scores(scores, reference, {99, 1});
    const AnalysisResult with_many = analyze_scores(scores, reference, {199, 2});
    // Observed coefficients and rates do not depend on the permutation draw.
    CHECK(coefficient_table_to_json(with_few.coefficients) ==
          coefficient_table_to_json(with_many.coefficients));
    for (const std::string& key : pooled_metric_keys()) {
        CHECK(with_few.report.pooled.at(key).rate == with_many.report.pooled.at(key).rate);
    }
    CHECK(with_few.redrawn_permutations == 0);
}
