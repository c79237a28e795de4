#pragma once
#include <complex>

namespace apbias {

// Kahan compensated accumulator. All reciprocal/power sums in the library
// accumulate through this in a fixed (ascending) order so results are
// reproducible bit-for-bit.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

struct KahanComplexSum {
    KahanSum re, im;

    void add(std::complex<double> z) {
        re.add(z.real());
        im.add(z.imag());
    }
    std::complex<double> value() const { return {re.value(), im.value()}; }
};

} // namespace apbias
