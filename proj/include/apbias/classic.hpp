#pragma once

namespace apbias {

// Euler's constant.
double euler_gamma();

// Riemann zeta on the real axis, s > 1. Euler-Maclaurin with cut N = 50 and
// 10 correction terms; relative error below 1e-15 for s >= 2.
double riemann_zeta(double s);

// Prime zeta P(s) = sum_p p^{-s} via P(s) = sum_{n>=1} mu(n)/n * log zeta(ns),
// truncated when |term| < 1e-18. Throws ConfigError for s <= 1.
double prime_zeta(double s);

// Mertens' constant B = sum_p (log(1 - 1/p) + 1/p) = -sum_{m>=2} P(m)/m,
// truncated at |term| < 1e-16. gamma + B is the Mertens-theorem constant
// 0.26149721284764...
double mertens_B();

} // namespace apbias
