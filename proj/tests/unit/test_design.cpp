#include <catch2/catch_amalgamated.hpp>

#include "surveysim/design.hpp"

using namespace surveysim;

namespace {

ScoreRecord row(Country c, double d, bool e, bool i, double p = 4.0, double m = 4.0) {
    ScoreRecord s;
    s.persona_id = std::string(country_code(c));
    s.country = c;
    s.d = d;
    s.e = e;
    s.i = i;
    s.p = p;
    s.m = m;
    return s;
}

} // namespace

TEST_CASE("two countries collapse to a single contrast column", "[design]") {
    std::vector<ScoreRecord> scores = {
        row(Country::Austria, 3, false, false), row(Country::Austria, 4, true, false),
        row(Country::Sweden, 5, false, true),   row(Country::Sweden, 2, true, true),
    };
    const DesignMatrix design = build_design_matrix(scores, Model::A, Outcome::Persuasion);
    REQUIRE(design.labels == std::vector<std::string>{"intercept", "C_at", "D", "E", "I"});
    // Austria rows carry +1, Sweden rows (the dropped level) carry -1.
    CHECK(design.x(0, 1) == 1.0);
    CHECK(design.x(1, 1) == 1.0);
    CHECK(design.x(2, 1) == -1.0);
    CHECK(design.x(3, 1) == -1.0);
}

TEST_CASE("model C on fifteen countries has twenty-two columns", "[design]") {
    std::vector<ScoreRecord> scores;
    int k = 0;
    for (Country c : kCountries) {
        scores.push_back(row(c, 1 + k % 7, k % 2 == 0, k % 3 == 0));
        scores.push_back(row(c, 7 - k % 7, k % 2 == 1, k % 3 == 1));
        ++k;
    }
    const DesignMatrix a = build_design_matrix(scores, Model::A, Outcome::Persuasion);
    const DesignMatrix b = build_design_matrix(scores, Model::B, Outcome::Persuasion);
    const DesignMatrix c = build_design_matrix(scores, Model::C, Outcome::Mobilization);
    CHECK(a.x.cols() == 18); // 1 + 14 + 3
    CHECK(b.x.cols() == 21); // + EI, DE, DI
    CHECK(c.x.cols() == 22); // + DEI
    CHECK(c.labels.back() == "DxExI");
    CHECK(c.countries.size() == 15);
}

TEST_CASE("interaction columns are elementwise products", "[design]") {
    std::vector<ScoreRecord> scores = {
        row(Country::Austria, 4, true, true), row(Country::Austria, 2, true, false),
        row(Country::Sweden, 3, false, true), row(Country::Sweden, 5, false, false),
    };
    const DesignMatrix design = build_design_matrix(scores, Model::C, Outcome::Persuasion);
    const auto col = [&](const std::string& label) {
        for (std::size_t j = 0; j < design.labels.size(); ++j) {
            if (design.labels[j] == label) return static_cast<Eigen::Index>(j);
        }
        FAIL("missing column " + label);
        return Eigen::Index{0};
    };
    // First row: D=4, E=1, I=1.
    CHECK(design.x(0, col("ExI")) == 1.0);
    CHECK(design.x(0, col("DxE")) == 4.0);
    CHECK(design.x(0, col("DxI")) == 4.0);
    CHECK(design.x(0, col("DxExI")) == 4.0);
    // Second row: D=2, E=1, I=0.
    CHECK(design.x(1, col("ExI")) == 0.0);
    CHECK(design.x(1, col("DxE")) == 2.0);
    CHECK(design.x(1, col("DxI")) == 0.0);
    CHECK(design.x(1, col("DxExI")) == 0.0);
}

TEST_CASE("country contrast columns sum to zero over a balanced design", "[design]") {
    std::vector<ScoreRecord> scores;
    for (Country c : kCountries) {
        scores.push_back(row(c, 3, false, true));
        scores.push_back(row(c, 5, true, false));
    }
    const DesignMatrix design = build_design_matrix(scores, Model::A, Outcome::Persuasion);
    for (Eigen::Index j = 1; j <= 14; ++j) {
        CHECK(design.x.col(j).sum() == 0.0);
    }
}

TEST_CASE("single-country input violates the precondition", "[design]") {
    std::vector<ScoreRecord> scores = {row(Country::Austria, 3, true, false),
                                       row(Country::Austria, 4, false, true)};
    REQUIRE_THROWS_AS(build_design_matrix(scores, Model::A, Outcome::Persuasion),
                      std::invalid_argument);
}

TEST_CASE("constant columns are named immediately", "[design]") {
    // Nobody saw the anti-immigrant article: the I column is identically zero.
    std::vector<ScoreRecord> scores = {
        row(Country::Austria, 3, false, false), row(Country::Austria, 4, true, false),
        row(Country::Sweden, 5, true, false),   row(Country::Sweden, 2, false, false),
    };
    REQUIRE_THROWS_WITH(build_design_matrix(scores, Model::A, Outcome::Persuasion),
                        Catch::Matchers::ContainsSubstring("singular design") &&
                            Catch::Matchers::ContainsSubstring(" I"));
}
