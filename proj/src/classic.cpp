#include "apbias/classic.hpp"
#include "apbias/errors.hpp"
#include "apbias/kahan.hpp"

#include <array>
#include <cmath>
#include <string>

namespace apbias {

double euler_gamma() { return 0.5772156649015328606; }

namespace {

// B_2, B_4, ..., B_20
constexpr std::array<double, 10> kBernoulli = {
    1.0 / 6,       -1.0 / 30,       1.0 / 42,         -1.0 / 30,        5.0 / 66,
    -691.0 / 2730, 7.0 / 6,         -3617.0 / 510,    43867.0 / 798,    -174611.0 / 330,
};

int moebius(int n) {
    int mu = 1;
    for (int p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            n /= p;
            if (n % p == 0) return 0;
            mu = -mu;
        }
    }
    if (n > 1) mu = -mu;
    return mu;
}

} // namespace

double riemann_zeta(double s) {
    if (!(s > 1.0)) throw ConfigError("riemann_zeta: requires s > 1");
    const int N = 50;
    KahanSum acc;
    for (int k = 1; k < N; ++k) acc.add(std::pow(double(k), -s));
    double Ns = std::pow(double(N), -s);
    acc.add(0.5 * Ns);
    acc.add(Ns * N / (s - 1.0)); // N^{1-s}/(s-1)
    // Correction terms: B_{2j}/(2j)! * s(s+1)...(s+2j-2) * N^{-s-2j+1}
    double rising = s;            // s(s+1)...(s+2j-2), built incrementally
    double npow = Ns / N;         // N^{-s-1}, then * N^{-2} per step
    double fact = 2.0;            // (2j)!
    for (int j = 1; j <= 10; ++j) {
        acc.add(kBernoulli[size_t(j - 1)] / fact * rising * npow);
        // advance to j+1: multiply rising by (s+2j-1)(s+2j), fact to (2j+2)!, npow by N^{-2}
        rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
        fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
        npow /= double(N) * double(N);
    }
    return acc.value();
}

double prime_zeta(double s) {
    if (!(s > 1.0)) throw ConfigError("prime_zeta: requires s > 1, got " + std::to_string(s));
    KahanSum acc;
    for (int n = 1; n <= 256; ++n) {
        int mu = moebius(n);
        if (mu == 0) continue;
        double term = mu * std::log(riemann_zeta(n * s)) / n;
        acc.add(term);
        if (std::fabs(term) < 1e-18) break;
    }
    return acc.value();
}

double mertens_B() {
    KahanSum acc;
    for (int m = 2; m <= 128; ++m) {
        double term = -prime_zeta(double(m)) / m;
        acc.add(term);
        if (std::fabs(term) < 1e-16) break;
    }
    return acc.value();
}

} // namespace apbias
