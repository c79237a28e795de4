#include <doctest.h>

#include "apbias/errors.hpp"
#include "apbias/primality.hpp"

using namespace apbias;

namespace {

bool slow_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

} // namespace

TEST_CASE("miller-rabin agrees with trial division") {
    for (std::uint64_t n = 0; n <= 100'000; ++n) {
        REQUIRE(is_prime_u64(n) == slow_prime(n));
    }
}

TEST_CASE("miller-rabin handles strong pseudoprime candidates") {
    CHECK(!is_prime_u64(3215031751ull));        // spsp to bases 2,3,5,7
    CHECK(!is_prime_u64(3825123056546413051ull)); // spsp to first 9 prime bases
    CHECK(is_prime_u64(18446744073709551557ull)); // largest prime < 2^64
    CHECK(!is_prime_u64(18446744073709551615ull));
}

TEST_CASE("least prime in arithmetic progressions") {
    CHECK(least_prime(4, 3) == 3);
    CHECK(least_prime(7, 5) == 5);
    CHECK(least_prime(13, 8) == 47); // scan 8, 21, 34, 47
    CHECK(least_prime(4, 1) == 5);
    CHECK(least_prime(3, 1) == 7);  // 1, 4, 7
    CHECK_THROWS_AS(least_prime(4, 2), ConfigError);
}
