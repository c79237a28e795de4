#include <doctest.h>

#include "apbias/errors.hpp"
#include "apbias/numerics.hpp"

#include <cmath>

using namespace apbias;

TEST_CASE("derivative of exp at 0") {
    auto f = [](double x) { return std::exp(x); };
    CHECK(std::fabs(derivative(f, 0.0, 1).value - 1.0) < 1e-10);
    CHECK(std::fabs(derivative(f, 0.0, 2).value - 1.0) < 1e-8);
    CHECK(std::fabs(derivative(f, 0.0, 4).value - 1.0) < 1e-3); // roundoff-limited at h^4
}

TEST_CASE("derivative of polynomials is near-exact") {
    auto f = [](double x) { return 3.0 * x * x * x - 2.0 * x + 7.0; };
    CHECK(std::fabs(derivative(f, 1.5, 1).value - (9.0 * 1.5 * 1.5 - 2.0)) < 1e-9);
    CHECK(std::fabs(derivative(f, 1.5, 2).value - 18.0 * 1.5) < 1e-6);
}

TEST_CASE("derivative rejects bad orders and non-finite samples") {
    auto f = [](double x) { return 1.0 / x; };
    CHECK_THROWS_AS(derivative(f, 0.0005, 1), NumericalError); // samples hit the pole side
    CHECK_THROWS_AS(derivative([](double) { return 1.0; }, 0.0, 3), ConfigError);
}

TEST_CASE("gauss-legendre rule integrates polynomials exactly") {
    const auto& rule = gauss_legendre_01(32);
    REQUIRE(rule.nodes.size() == 32);
    double wsum = 0.0, linear = 0.0, deg10 = 0.0;
    for (std::size_t i = 0; i < 32; ++i) {
        wsum += rule.weights[i];
        linear += rule.weights[i] * rule.nodes[i];
        deg10 += rule.weights[i] * std::pow(rule.nodes[i], 10);
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(linear == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(deg10 == doctest::Approx(1.0 / 11.0).epsilon(1e-13));
}

TEST_CASE("remainder integral") {
    // f'' == 1: integral_0^1 (1-t) dt = 1/2 exactly
    CHECK(remainder_tilde([](double) { return 1.0; }, 3.0) == doctest::Approx(0.5).epsilon(1e-15));
    // z = 0: f2(0)/2
    CHECK(remainder_tilde([](double w) { return std::cos(w); }, 0.0) ==
          doctest::Approx(0.5).epsilon(1e-14));
    // analytic check: f2 = exp, integral_0^1 e^{tz}(1-t) dt = (e^z - 1 - z)/z^2
    double z = 1.7;
    double want = (std::exp(z) - 1.0 - z) / (z * z);
    CHECK(remainder_tilde([](double w) { return std::exp(w); }, z) ==
          doctest::Approx(want).epsilon(1e-13));
    CHECK_THROWS_AS(remainder_tilde([](double) { return 1.0; }, 9.0), ConfigError);
}
