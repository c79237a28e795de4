#include "apbias/special.hpp"
#include "apbias/classic.hpp"
#include "apbias/errors.hpp"
#include "apbias/kahan.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace apbias {

double digamma_rational(std::int64_t num, std::int64_t den) {
    if (num <= 0 || num >= den)
        throw ConfigError("digamma_rational: need 0 < num < den, got " + std::to_string(num) +
                          "/" + std::to_string(den));
    const double pi = std::numbers::pi;
    double x = double(num) / double(den);
    double result = -euler_gamma() - std::log(2.0 * double(den)) - (pi / 2.0) / std::tan(pi * x);
    KahanSum trig;
    for (std::int64_t n = 1; n <= (den - 1) / 2; ++n) {
        trig.add(std::cos(2.0 * pi * double(n) * x) * std::log(std::sin(pi * double(n) / double(den))));
    }
    return result + 2.0 * trig.value();
}

namespace {

// Lanczos coefficients, g = 7, 9 terms.
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,    676.5203681218851,      -1259.1392167224028,
    771.32342877765313,     -176.61502916214059,    12.507343278686905,
    -0.13857109526572012,   9.9843695780195716e-6,  1.5056327351493116e-7,
};

std::complex<double> gamma_positive_half(std::complex<double> x) {
    // valid for Re x >= 0.5
    const double g = 7.0;
    std::complex<double> z = x - 1.0;
    std::complex<double> a = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (z + double(i));
    std::complex<double> t = z + g + 0.5;
    const double sqrt_two_pi = 2.5066282746310002;
    return sqrt_two_pi * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

} // namespace

std::complex<double> gamma_complex(std::complex<double> x) {
    const double pi = std::numbers::pi;
    if (x.imag() == 0.0 && x.real() <= 0.0 && x.real() == std::floor(x.real()))
        throw ConfigError("gamma_complex: pole at " + std::to_string(x.real()));
    if (x.real() < 0.5) {
        // Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return pi / (std::sin(pi * x) * gamma_positive_half(1.0 - x));
    }
    return gamma_positive_half(x);
}

} // namespace apbias
