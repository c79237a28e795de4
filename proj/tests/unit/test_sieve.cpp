#include <doctest.h>

#include "apbias/errors.hpp"
#include "apbias/kahan.hpp"
#include "apbias/primality.hpp"
#include "apbias/sieve.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>

using namespace apbias;

namespace {

bool slow_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

} // namespace

TEST_CASE("small membership and pi(10^6)") {
    auto sieve = SieveTable::build(1'000'000);
    CHECK(sieve.is_prime(97));
    CHECK(!sieve.is_prime(91)); // 7 * 13
    CHECK(sieve.is_prime(2));
    CHECK(!sieve.is_prime(1));
    CHECK(!sieve.is_prime(0));
    // brute-force trial division count, with a full membership sweep
    std::uint64_t brute = 0, mismatches = 0;
    for (std::uint64_t n = 2; n <= 1'000'000; ++n) {
        bool p = slow_prime(n);
        if (p) ++brute;
        if (sieve.is_prime(n) != p) ++mismatches;
    }
    CHECK(brute == 78498);
    CHECK(mismatches == 0);
    CHECK(sieve.prime_count(1'000'000) == brute);
    CHECK(sieve.prime_count(1) == 0);
    CHECK(sieve.prime_count(2) == 1);
    CHECK(sieve.prime_count(3) == 2);
    CHECK_THROWS_AS(sieve.prime_count(2'000'000), ConfigError);
}

TEST_CASE("membership agrees with trial division across block boundaries") {
    auto sieve = SieveTable::build(300'000);
    for (std::uint64_t n = 65'500; n <= 65'600; ++n) CHECK(sieve.is_prime(n) == slow_prime(n));
    for (std::uint64_t n = 131'020; n <= 131'120; ++n) CHECK(sieve.is_prime(n) == slow_prime(n));
}

TEST_CASE("sieve construction guards") {
    CHECK_THROWS_AS(SieveTable::build(2), ConfigError);
    CHECK_THROWS_AS(SieveTable::build(100, 2), ConfigError);
    SieveOptions tiny;
    tiny.memory_budget_bytes = 16;
    CHECK_THROWS_AS(SieveTable::build(1'000'000, 0, tiny), ResourceError);
    SieveOptions bad_seg;
    bad_seg.segment_numbers = 1000;
    CHECK_THROWS_AS(SieveTable::build(1'000'000, 0, bad_seg), ConfigError);
}

TEST_CASE("deterministic across segment sizes and workers") {
    SieveOptions a, b, c;
    a.segment_numbers = std::uint64_t(1) << 14;
    b.segment_numbers = std::uint64_t(1) << 22;
    c.segment_numbers = std::uint64_t(1) << 17;
    a.workers = 1;
    b.workers = 4;
    c.workers = 8;
    auto sa = SieveTable::build(2'000'003, 0, a);
    auto sb = SieveTable::build(2'000'003, 0, b);
    auto sc = SieveTable::build(2'000'003, 0, c);
    CHECK(sa.checksum() == sb.checksum());
    CHECK(sa.checksum() == sc.checksum());
    CHECK(sa.prime_count(2'000'003) == sb.prime_count(2'000'003));
}

TEST_CASE("prime counts per residue class") {
    auto sieve = SieveTable::build(1'000'000, 4);
    CHECK(sieve.prime_count_in_class(20, 4, 3) == 4); // 3, 7, 11, 19
    CHECK(sieve.prime_count_in_class(20, 4, 1) == 3); // 5, 13, 17
    CHECK_THROWS_AS(sieve.prime_count_in_class(20, 4, 2), ConfigError);

    // direct scan oracle at a non-attached modulus
    std::uint64_t direct = 0;
    for (std::uint64_t p = 2; p <= 100'000; ++p)
        if (slow_prime(p) && p % 3 == 1) ++direct;
    CHECK(sieve.prime_count_in_class(100'000, 3, 1) == direct);

    // class-sum identity at several y, q attached
    for (std::uint64_t y : {100ull, 65'536ull, 100'000ull, 999'999ull}) {
        std::uint64_t total = 0;
        for (std::uint64_t r : sieve.classes()) total += sieve.prime_count_in_class(y, 4, r);
        CHECK(total + 1 == sieve.prime_count(y)); // only p = 2 divides 4
    }
}

TEST_CASE("class counts are non-decreasing in y") {
    auto sieve = SieveTable::build(200'000, 12);
    std::vector<std::uint64_t> prev(sieve.classes().size(), 0);
    for (std::uint64_t y = 1000; y <= 200'000; y += 13'771) {
        auto counts = sieve.class_counts_upto(y);
        for (std::size_t c = 0; c < counts.size(); ++c) {
            CHECK(counts[c] >= prev[c]);
        }
        prev = counts;
    }
}

TEST_CASE("reciprocal sums per class") {
    auto sieve = SieveTable::build(10'000'000);
    CHECK(sieve.reciprocal_sum_in_class(10, 4, 3) ==
          doctest::Approx(1.0 / 3 + 1.0 / 7).epsilon(1e-15));
    CHECK(sieve.reciprocal_sum_in_class(10, 4, 1) == doctest::Approx(0.2).epsilon(1e-15));

    // monotone in the cutoff
    double a = sieve.reciprocal_sum_in_class(1'000, 4, 3);
    double b = sieve.reciprocal_sum_in_class(100'000, 4, 3);
    double c = sieve.reciprocal_sum_in_class(10'000'000, 4, 3);
    CHECK(a < b);
    CHECK(b < c);

    PrimeSums sums = sieve.prime_sums(4, 1'000'000);
    KahanSum total;
    for (double v : sums.per_class) total.add(v);
    CHECK(std::fabs(total.value() - sums.coprime_total) <
          1e-12 * double(sieve.prime_count(1'000'000)));
}

TEST_CASE("bitset cache round-trips with CRC") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "apbias-cache-test";
    fs::create_directories(dir);
    SieveOptions opts;
    opts.cache_dir = dir.string();
    auto first = SieveTable::build(500'000, 4, opts);
    auto cached = SieveTable::try_load_cache(dir.string(), 500'000, 4);
    REQUIRE(cached.has_value());
    CHECK(cached->checksum() == first.checksum());
    CHECK(!SieveTable::try_load_cache(dir.string(), 500'001, 4).has_value());

    // corrupt one byte: the CRC must reject the file
    fs::path file = dir / "sieve-500000-m4.apb";
    REQUIRE(fs::exists(file));
    {
        std::FILE* f = std::fopen(file.string().c_str(), "r+b");
        REQUIRE(f);
        std::fseek(f, 64, SEEK_SET);
        unsigned char byte = 0;
        CHECK(std::fread(&byte, 1, 1, f) == 1);
        byte ^= 0xFF;
        std::fseek(f, 64, SEEK_SET);
        CHECK(std::fwrite(&byte, 1, 1, f) == 1);
        std::fclose(f);
    }
    CHECK(!SieveTable::try_load_cache(dir.string(), 500'000, 4).has_value());
    fs::remove_all(dir);
}

TEST_CASE("cache-loaded tables answer checkpointed queries") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "apbias-cache-query-test";
    fs::create_directories(dir);
    SieveOptions opts;
    opts.cache_dir = dir.string();
    auto fresh = SieveTable::build(400'000, 12, opts);
    auto reloaded = SieveTable::build(400'000, 12, opts); // second build hits the cache
    REQUIRE(SieveTable::try_load_cache(dir.string(), 400'000, 12).has_value());
    for (std::uint64_t y : {70'000ull, 200'000ull, 399'999ull}) {
        CHECK(reloaded.prime_count(y) == fresh.prime_count(y));
        CHECK(reloaded.prime_count_in_class(y, 12, 5) == fresh.prime_count_in_class(y, 12, 5));
    }
    auto direct = SieveTable::try_load_cache(dir.string(), 400'000, 12);
    REQUIRE(direct.has_value());
    CHECK(direct->prime_count(399'999) == fresh.prime_count(399'999));
    fs::remove_all(dir);
}

TEST_CASE("crc64 reference value") {
    // CRC-64/XZ check value for "123456789"
    CHECK(crc64("123456789", 9) == 0x995DC9BBDF1939FAull);
}
