#include <doctest.h>

#include "apbias/classic.hpp"
#include "apbias/errors.hpp"
#include "apbias/kahan.hpp"
#include "apbias/special.hpp"

#include <cmath>
#include <complex>
#include <numbers>

using namespace apbias;

namespace {

// psi(x) = -gamma + sum_{n>=0} (1/(n+1) - 1/(n+x)), with a first-order tail
// correction so 10^6 terms reach ~1e-9.
double digamma_series_oracle(double x) {
    KahanSum s;
    const int N = 1'000'000;
    for (int n = 0; n < N; ++n) s.add(1.0 / (n + 1.0) - 1.0 / (n + x));
    double tail = (x - 1.0) / double(N); // sum_{n>=N} (x-1)/((n+1)(n+x)) ~ (x-1)/N
    return -euler_gamma() + s.value() + tail;
}

} // namespace

TEST_CASE("digamma at rational points vs the series oracle") {
    CHECK(std::fabs(digamma_rational(1, 2) - digamma_series_oracle(0.5)) < 1e-8);
    CHECK(std::fabs(digamma_rational(1, 4) - digamma_series_oracle(0.25)) < 1e-8);
    CHECK(std::fabs(digamma_rational(3, 7) - digamma_series_oracle(3.0 / 7.0)) < 1e-8);
}

TEST_CASE("digamma closed forms") {
    const double g = euler_gamma();
    const double pi = std::numbers::pi;
    CHECK(digamma_rational(1, 2) == doctest::Approx(-g - 2.0 * std::log(2.0)).epsilon(1e-13));
    CHECK(digamma_rational(1, 4) ==
          doctest::Approx(-g - 3.0 * std::log(2.0) - pi / 2.0).epsilon(1e-13));
    // reflection: psi(1-x) - psi(x) = pi cot(pi x)
    CHECK(digamma_rational(3, 4) - digamma_rational(1, 4) ==
          doctest::Approx(pi / std::tan(pi / 4.0)).epsilon(1e-12));
    // duplication at x = 1/2: psi(1/2) = psi(1) - 2 log 2 with psi(1) = -gamma
    CHECK(digamma_rational(1, 2) == doctest::Approx(-g - 2.0 * std::log(2.0)).epsilon(1e-13));
    CHECK_THROWS_AS(digamma_rational(0, 5), ConfigError);
    CHECK_THROWS_AS(digamma_rational(5, 5), ConfigError);
    CHECK_THROWS_AS(digamma_rational(7, 5), ConfigError);
}

TEST_CASE("gamma function special values") {
    const double pi = std::numbers::pi;
    CHECK(std::abs(gamma_complex({1.0, 0.0}) - std::complex<double>{1.0, 0.0}) < 1e-14);
    CHECK(std::abs(gamma_complex({5.0, 0.0}) - std::complex<double>{24.0, 0.0}) < 3e-13);
    CHECK(gamma_complex({0.5, 0.0}).real() == doctest::Approx(std::sqrt(pi)).epsilon(1e-13));
    CHECK(gamma_complex({1.5, 0.0}).real() == doctest::Approx(0.8862269254527580).epsilon(1e-12));
    // |Gamma(1 + i)|^2 = pi / sinh(pi)
    double want = std::sqrt(pi / std::sinh(pi));
    CHECK(std::abs(gamma_complex({1.0, 1.0})) == doctest::Approx(want).epsilon(1e-12));
    // reflection at a negative half-integer: Gamma(-1/2) = -2 sqrt(pi)
    CHECK(gamma_complex({-0.5, 0.0}).real() ==
          doctest::Approx(-2.0 * std::sqrt(pi)).epsilon(1e-12));
    CHECK_THROWS_AS(gamma_complex({0.0, 0.0}), ConfigError);
    CHECK_THROWS_AS(gamma_complex({-3.0, 0.0}), ConfigError);
}

TEST_CASE("gamma matches std::tgamma on the real axis") {
    for (double x : {0.1, 0.7, 1.0, 2.3, 4.9, 7.5, 12.0, 33.5, 64.5}) {
        CHECK(gamma_complex({x, 0.0}).real() == doctest::Approx(std::tgamma(x)).epsilon(5e-13));
    }
}
