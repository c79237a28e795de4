#pragma once
#include <complex>
#include <cstdint>

namespace apbias {

// psi(num/den) for 0 < num < den, by Gauss's closed form:
//   psi(p/q) = -gamma - ln(2q) - (pi/2) cot(pi p/q)
//              + 2 sum_{n=1}^{floor((q-1)/2)} cos(2 pi n p / q) ln sin(pi n / q)
double digamma_rational(std::int64_t num, std::int64_t den);

// Complex gamma function, Lanczos approximation (g = 7, 9 coefficients) with
// reflection for Re x < 1/2. Relative error <= ~1e-13 on the moduli in use.
// Throws ConfigError at non-positive integer poles.
std::complex<double> gamma_complex(std::complex<double> x);

} // namespace apbias
