#include <catch2/catch_amalgamated.hpp>

#include "surveysim/backend.hpp"

using namespace surveysim;

TEST_CASE("plain digits parse", "[rating]") {
    REQUIRE(parse_rating("5") == 5);
    REQUIRE(parse_rating(" 7.\n") == 7);
    REQUIRE(parse_rating("Rating: 6") == 6);
    REQUIRE(parse_rating("1") == 1);
}

TEST_CASE("text without an integer is unparseable", "[rating]") {
    REQUIRE_THROWS_WITH(parse_rating("I cannot answer"),
                        Catch::Matchers::ContainsSubstring("unparseable"));
    REQUIRE_THROWS_AS(parse_rating(""), ParseError);
    REQUIRE_THROWS_AS(parse_rating("strongly agree"), ParseError);
}

TEST_CASE("first integer outside one to seven is out of range", "[rating]") {
    REQUIRE_THROWS_WITH(parse_rating("0"), Catch::Matchers::ContainsSubstring("out of range"));
    REQUIRE_THROWS_AS(parse_rating("8"), ParseError);
    REQUIRE_THROWS_AS(parse_rating("10"), ParseError);
    REQUIRE_THROWS_AS(parse_rating("-3"), ParseError);
    // First token wins even when a valid one follows.
    REQUIRE_THROWS_AS(parse_rating("9, or maybe 5"), ParseError);
}

TEST_CASE("parse is identity on formatted ratings", "[rating]") {
    for (int r = 1; r <= 7; ++r) {
        REQUIRE(parse_rating(std::to_string(r)) == r);
    }
}
