#include <doctest.h>

#include "apbias/counting.hpp"
#include "apbias/errors.hpp"
#include "apbias/sieve.hpp"

#include <numeric>
#include <random>

using namespace apbias;
using u64 = std::uint64_t;

namespace {

SieveTable sieve_for(u64 x, int k, u64 q, int workers = 1) {
    SieveOptions opts;
    opts.workers = workers;
    return SieveTable::build(required_sieve_limit(x, k, q), q, opts);
}

u64 map_total(const std::map<ResidueSignature, u64>& m) {
    u64 t = 0;
    for (auto& [sig, cnt] : m) t += cnt;
    return t;
}

} // namespace

TEST_CASE("hand-checked counts at x = 100, q = 4") {
    auto sieve = sieve_for(100, 2, 4);
    CHECK(count_S_k(sieve, 100, 2, 4) == 16);
    CHECK(count_M_k(sieve, 100, parse_signature("3^2", 4)) == 6); // 21,33,57,69,77,93
    CHECK(count_M_k(sieve, 100, parse_signature("1^2", 4)) == 2); // 65,85
    CHECK(count_M_k(sieve, 100, parse_signature("1*3", 4)) == 8);
    auto all = count_all_signatures(sieve, 100, 2, 4);
    CHECK(all.size() == 3);
    CHECK(all.at(parse_signature("1^2", 4)) == 2);
    CHECK(all.at(parse_signature("1*3", 4)) == 8);
    CHECK(all.at(parse_signature("3^2", 4)) == 6);
    CHECK(map_total(all) == 16);
}

TEST_CASE("k = 1 degenerates to prime counting") {
    auto sieve = sieve_for(1000, 1, 4);
    CHECK(count_S_k(sieve, 1000, 1, 4) == sieve.prime_count(1000) - 1); // minus p = 2
    CHECK(count_M_k(sieve, 1000, parse_signature("3", 4)) ==
          sieve.prime_count_in_class(1000, 4, 3));
}

TEST_CASE("no products fit below the smallest admissible product") {
    auto sieve = sieve_for(50, 3, 4);
    CHECK(count_all_signatures(sieve, 50, 3, 4).empty()); // 3*5*7 = 105 > 50
    CHECK(count_S_k(sieve, 50, 3, 4) == 0);
}

TEST_CASE("brute force oracle on a hand-checkable case") {
    auto m = brute_force_counts(30, 2, 3);
    REQUIRE(m.size() == 2);
    CHECK(m.at(parse_signature("1*2", 3)) == 2); // 14 = 2*7, 26 = 2*13
    CHECK(m.at(parse_signature("2^2", 3)) == 2); // 10 = 2*5, 22 = 2*11
    CHECK_THROWS_AS(brute_force_counts(20'000'000, 2, 3), ResourceError);
}

TEST_CASE("enumeration equals brute force over a parameter grid") {
    for (u64 q : {3ull, 4ull, 7ull}) {
        SpfTable spf(100'000);
        for (int k : {1, 2, 3, 4}) {
            auto sieve = sieve_for(100'000, k, q);
            auto enumerated = count_all_signatures(sieve, 100'000, k, q);
            auto brute = brute_force_counts(spf, 100'000, k, q);
            CHECK(enumerated == brute);
            CHECK(map_total(enumerated) == count_S_k(sieve, 100'000, k, q));
        }
    }
}

TEST_CASE("partition identity and single-signature agreement at 10^6") {
    auto sieve = sieve_for(1'000'000, 3, 12);
    auto all = count_all_signatures(sieve, 1'000'000, 3, 12);
    CHECK(map_total(all) == count_S_k(sieve, 1'000'000, 3, 12));
    for (auto& [sig, cnt] : all) {
        CHECK(count_M_k(sieve, 1'000'000, sig) == cnt);
    }
}

TEST_CASE("counts are monotone in x and deterministic across workers") {
    auto sieve = sieve_for(2'000'000, 2, 3, 4);
    u64 prev = 0;
    for (u64 x : {10'000ull, 100'000ull, 1'000'000ull, 2'000'000ull}) {
        u64 v = count_S_k(sieve, x, 2, 3);
        CHECK(v >= prev);
        prev = v;
    }
    ResidueSignature sig = parse_signature("2^2", 3);
    u64 w1 = count_M_k(sieve, 2'000'000, sig, nullptr, 1);
    u64 w4 = count_M_k(sieve, 2'000'000, sig, nullptr, 4);
    u64 w8 = count_M_k(sieve, 2'000'000, sig, nullptr, 8);
    CHECK(w1 == w4);
    CHECK(w1 == w8);
    CountStats s1, s8;
    count_all_signatures(sieve, 1'000'000, 2, 3, &s1, 1);
    count_all_signatures(sieve, 1'000'000, 2, 3, &s8, 8);
    CHECK(s1.nodes == s8.nodes);
}

TEST_CASE("randomized oracle equivalence (fixed seed)") {
    std::mt19937 rng(987654);
    std::uniform_int_distribution<u64> pick_x(100, 30'000);
    const u64 moduli[] = {3, 4, 5, 7, 8, 9, 12, 13, 15};
    for (int trial = 0; trial < 24; ++trial) {
        u64 x = pick_x(rng);
        u64 q = moduli[rng() % std::size(moduli)];
        int k = 1 + int(rng() % 4);
        auto sieve = sieve_for(x, k, q);
        auto enumerated = count_all_signatures(sieve, x, k, q);
        auto brute = brute_force_counts(x, k, q);
        CAPTURE(x);
        CAPTURE(q);
        CAPTURE(k);
        CHECK(enumerated == brute);
        u64 total = 0;
        for (auto& [sig, cnt] : enumerated) total += cnt;
        CHECK(total == count_S_k(sieve, x, k, q));
    }
}

TEST_CASE("oversized k short-circuits to zero") {
    auto sieve = sieve_for(1'000'000, 20, 3);
    CHECK(count_S_k(sieve, 1'000'000, 20, 3) == 0);
    CHECK(count_all_signatures(sieve, 1'000'000, 12, 3).empty());
}

TEST_CASE("input validation") {
    auto sieve = sieve_for(1000, 2, 4);
    CHECK_THROWS_AS(count_S_k(sieve, 1000, 2, 5), ConfigError);   // wrong attached modulus
    CHECK_THROWS_AS(count_S_k(sieve, 1'000'000, 2, 4), ConfigError); // sieve too small
    ResidueSignature sig = parse_signature("3^2", 4);
    CHECK_THROWS_AS(count_M_k(sieve, 1'000'000, sig), ConfigError);
}

TEST_CASE("required sieve limit") {
    CHECK(required_sieve_limit(100, 2, 4) == 100 / 3);   // smallest usable prime is 3
    CHECK(required_sieve_limit(100, 2, 3) == 50);        // p = 2 usable
    CHECK(required_sieve_limit(1'000'000, 1, 4) == 1'000'000);
    // k large enough that no product fits: falls back to sqrt-scale
    CHECK(required_sieve_limit(100, 10, 3) >= 10);
}
