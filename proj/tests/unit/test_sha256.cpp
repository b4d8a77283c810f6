#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "surveysim/sha256.hpp"

using namespace surveysim;

// FIPS 180-4 test vectors.
TEST_CASE("sha256 standard vectors", "[sha256]") {
    REQUIRE(sha256_hex("") ==
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    REQUIRE(sha256_hex("abc") ==
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    REQUIRE(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
            "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
    REQUIRE(sha256_hex(std::string(1000000, 'a')) ==
            "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("sha256 incremental update equals one-shot", "[sha256]") {
    const std::string text = "the quick brown fox jumps over the lazy dog, repeatedly";
    Sha256 h;
    for (char c : text) h.update(&c, 1);
    const auto digest = h.digest();
    std::string hex;
    for (unsigned char b : digest) {
        static constexpr char d[] = "0123456789abcdef";
        hex.push_back(d[b >> 4]);
        hex.push_back(d[b & 0xf]);
    }
    REQUIRE(hex == sha256_hex(text));
}
