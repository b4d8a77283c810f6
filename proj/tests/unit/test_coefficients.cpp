#include <catch2/catch_amalgamated.hpp>

#include "surveysim/coefficients.hpp"
#include "surveysim/rng.hpp"

using namespace surveysim;

namespace {

// A deterministic population whose responses are intentionally nonlinear in
// the model terms, so the three nested fits genuinely disagree.
std::vector<ScoreRecord> synthetic_scores(int per_cell, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<ScoreRecord> scores;
    int serial = 0;
    for (Country c : kCountries) {
        for (int k = 0; k < per_cell; ++k) {
            ScoreRecord s;
            s.persona_id = std::string(country_code(c)) + "-" + std::to_string(serial++);
            s.country = c;
            s.d = 1.0 + static_cast<double>(rng.below(7));
            s.e = rng.below(2) == 1;
            s.i = rng.below(2) == 1;
            const double ev = s.e ? 1 : 0;
            const double iv = s.i ? 1 : 0;
            const double country_effect =
                0.05 * (static_cast<double>(c) - 7.0); // sums to zero over the 15 levels
            s.p = 3.0 + country_effect + 0.2 * s.d + 0.5 * ev - 0.4 * iv + 0.6 * ev * iv +
                  0.3 * rng.normal();
            s.m = 4.0 - country_effect + 0.1 * s.d + 0.2 * ev - 0.2 * iv - 0.03 * s.d * ev * iv +
                  0.3 * rng.normal();
            scores.push_back(std::move(s));
        }
    }
    return scores;
}

struct Fits {
    OlsFit a, b, c;
    std::vector<Country> countries;
};

Fits fit_all(const std::vector<ScoreRecord>& scores, Outcome outcome) {
    DesignMatrix da = build_design_matrix(scores, Model::A, outcome);
    DesignMatrix db = build_design_matrix(scores, Model::B, outcome);
    DesignMatrix dc = build_design_matrix(scores, Model::C, outcome);
    return {fit_ols(da.x, da.y, da.labels), fit_ols(db.x, db.y, db.labels),
            fit_ols(dc.x, dc.y, dc.labels), da.countries};
}

} // namespace

TEST_CASE("every coefficient comes from the earliest model", "[coefficients]") {
    const auto scores = synthetic_scores(24, 5);
    const Fits fits = fit_all(scores, Outcome::Persuasion);
    const OutcomeCoefficients extracted =
        extract_coefficients(fits.a, fits.b, fits.c, fits.countries);

    CHECK(extracted.d.value == fits.a.coefficients(fits.a.column("D")));
    CHECK(extracted.e.value == fits.a.coefficients(fits.a.column("E")));
    CHECK(extracted.i.value == fits.a.coefficients(fits.a.column("I")));
    CHECK(extracted.ei.value == fits.b.coefficients(fits.b.column("ExI")));
    CHECK(extracted.de.value == fits.b.coefficients(fits.b.column("DxE")));
    CHECK(extracted.di.value == fits.b.coefficients(fits.b.column("DxI")));
    CHECK(extracted.dei.value == fits.c.coefficients(fits.c.column("DxExI")));

    // Models B and C estimate E and EI too; the earlier model wins even when
    // the later fit differs.
    CHECK(extracted.e.value != fits.c.coefficients(fits.c.column("E")));
    CHECK(extracted.ei.value != fits.c.coefficients(fits.c.column("ExI")));

    REQUIRE(extracted.intercept.has_value());
    CHECK(extracted.intercept->value == fits.a.coefficients(fits.a.column("intercept")));
}

TEST_CASE("extraction is invariant to fit order", "[coefficients]") {
    const auto scores = synthetic_scores(20, 8);
    const Fits fits = fit_all(scores, Outcome::Mobilization);
    const auto direct = extract_coefficients(fits.a, fits.b, fits.c, fits.countries);
    const auto reversed = extract_coefficients(fits.c, fits.a, fits.b, fits.countries);
    CHECK(direct.country == reversed.country);
    CHECK(direct.dei == reversed.dei);
    CHECK(direct.e == reversed.e);
}

TEST_CASE("the fifteen country effects sum to zero", "[coefficients]") {
    const auto scores = synthetic_scores(24, 11);
    const Fits fits = fit_all(scores, Outcome::Persuasion);
    const auto extracted = extract_coefficients(fits.a, fits.b, fits.c, fits.countries);
    REQUIRE(extracted.country.size() == 15);
    CHECK_THAT(extracted.country_value_sum(), Catch::Matchers::WithinAbs(0.0, 1e-9));
}

TEST_CASE("the dropped level matches a refit that drops another level", "[coefficients]") {
    // Re-fitting with countries relabeled so a different level is dropped must
    // reproduce the same estimate and standard error for the recovered one.
    const auto scores = synthetic_scores(24, 13);
    const Fits fits = fit_all(scores, Outcome::Persuasion);
    const auto extracted = extract_coefficients(fits.a, fits.b, fits.c, fits.countries);
    const Country last = fits.countries.back();

    auto relabeled = scores;
    for (ScoreRecord& s : relabeled) {
        // Swap the dropped country with the first one.
        if (s.country == last) {
            s.country = fits.countries.front();
        } else if (s.country == fits.countries.front()) {
            s.country = last;
        }
    }
    const Fits swapped = fit_all(relabeled, Outcome::Persuasion);
    const auto swapped_extract =
        extract_coefficients(swapped.a, swapped.b, swapped.c, swapped.countries);
    // After the swap, the old dropped level's effect sits on the first label.
    const CoefficientEstimate& direct = swapped_extract.country.at(fits.countries.front());
    CHECK_THAT(extracted.country.at(last).value, Catch::Matchers::WithinAbs(direct.value, 1e-9));
    CHECK_THAT(extracted.country.at(last).se, Catch::Matchers::WithinAbs(direct.se, 1e-9));
}

TEST_CASE("coefficient tables round-trip through JSON", "[coefficients]") {
    const auto scores = synthetic_scores(20, 17);
    CoefficientTable table;
    {
        const Fits fp = fit_all(scores, Outcome::Persuasion);
        table.persuasion = extract_coefficients(fp.a, fp.b, fp.c, fp.countries);
        const Fits fm = fit_all(scores, Outcome::Mobilization);
        table.mobilization = extract_coefficients(fm.a, fm.b, fm.c, fm.countries);
    }
    const nlohmann::json j = coefficient_table_to_json(table);
    const CoefficientTable restored = coefficient_table_from_json(j);
    CHECK(restored.persuasion.country == table.persuasion.country);
    CHECK(restored.persuasion.dei == table.persuasion.dei);
    CHECK(restored.mobilization.e == table.mobilization.e);
    REQUIRE(restored.persuasion.intercept.has_value());
    CHECK(restored.persuasion.intercept->value == table.persuasion.intercept->value);
    CHECK(coefficient_table_to_json(restored) == j);
}

TEST_CASE("incomplete tables list their missing terms", "[coefficients]") {
    nlohmann::json j = nlohmann::json::object();
    j["lambda_D_P"] = {{"value", 0.1}, {"se", 0.01}};
    REQUIRE_THROWS_WITH(coefficient_table_from_json(j),
                        Catch::Matchers::ContainsSubstring("lambda_E_P") &&
                            Catch::Matchers::ContainsSubstring("C_uk_M"));
}
