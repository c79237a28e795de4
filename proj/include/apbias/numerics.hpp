#pragma once
#include <functional>
#include <vector>

namespace apbias {

struct DerivResult {
    double value = 0.0;
    double err_estimate = 0.0;
};

// Central differences with two levels of Richardson extrapolation.
// order in {1, 2, 4}; base step 1e-3 for orders 1-2, 5e-3 for order 4.
// Throws NumericalError on non-finite samples.
DerivResult derivative(const std::function<double(double)>& f, double at, int order);

struct GaussLegendre {
    std::vector<double> nodes;   // on [0, 1]
    std::vector<double> weights; // sum to 1
};

// n-point Gauss-Legendre rule mapped to [0, 1]; nodes by Newton iteration.
const GaussLegendre& gauss_legendre_01(int n);

// integral_0^1 f2(t * z) (1 - t) dt with the 32-node rule. f2 is the second
// derivative of the function whose expansion remainder is wanted; at z = 0
// this is f2(0)/2.
double remainder_tilde(const std::function<double(double)>& f2, double z);

} // namespace apbias
