#include <doctest.h>

#include "apbias/errors.hpp"
#include "apbias/signature.hpp"

using namespace apbias;

TEST_CASE("signature grammar") {
    ResidueSignature sig = parse_signature("3^2", 4);
    CHECK(sig.k_total() == 2);
    CHECK(sig.num_classes() == 1);
    CHECK(sig.str() == "3^2");

    sig = parse_signature("1^1*3^1", 4);
    CHECK(sig.k_total() == 2);
    CHECK(sig.num_classes() == 2);
    CHECK(sig.str() == "1^1*3^1");

    // "^1" optional
    CHECK(parse_signature("1*3", 4) == parse_signature("1^1*3^1", 4));
    // order does not matter, result is canonical ascending
    CHECK(parse_signature("3*1", 4).str() == "1^1*3^1");
}

TEST_CASE("residues reduce mod q with a warning, duplicates merge") {
    std::string warn;
    ResidueSignature sig = parse_signature("7^1*3^1", 4, &warn);
    CHECK(sig.str() == "3^2");
    CHECK(!warn.empty());
}

TEST_CASE("rejects non-coprime residues and bad grammar") {
    CHECK_THROWS_AS(parse_signature("2^2", 4), ConfigError);
    CHECK_THROWS_AS(parse_signature("", 4), ConfigError);
    CHECK_THROWS_AS(parse_signature("3^", 4), ConfigError);
    CHECK_THROWS_AS(parse_signature("x", 4), ConfigError);
    CHECK_THROWS_AS(parse_signature("3^0", 4), ConfigError);
    CHECK_THROWS_AS(parse_signature("3^65", 4), ConfigError);
}

TEST_CASE("ordering multinomial") {
    CHECK(ordering_multinomial(parse_signature("3^2", 4)) == 1.0);
    CHECK(ordering_multinomial(parse_signature("1*3", 4)) == 2.0);
    CHECK(ordering_multinomial(parse_signature("1^2*3^1", 4)) == 3.0);
    CHECK(ordering_multinomial(parse_signature("1^2*3^2", 4)) == 6.0);
}

TEST_CASE("same-class helper") {
    ResidueSignature sig = same_class_signature(4, 3, 5);
    CHECK(sig.k_total() == 5);
    CHECK(sig.str() == "3^5");
    CHECK_THROWS_AS(same_class_signature(4, 2, 2), ConfigError);
}
