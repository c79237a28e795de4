#include "apbias/numerics.hpp"
#include "apbias/errors.hpp"
#include "apbias/kahan.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>

namespace apbias {

namespace {

double sample(const std::function<double(double)>& f, double x) {
    double v = f(x);
    if (!std::isfinite(v))
        throw NumericalError("derivative: non-finite sample at x=" + std::to_string(x));
    return v;
}

// One finite-difference estimate at step h.
double stencil(const std::function<double(double)>& f, double at, int order, double h) {
    switch (order) {
    case 1:
        return (sample(f, at + h) - sample(f, at - h)) / (2.0 * h);
    case 2:
        return (sample(f, at + h) - 2.0 * sample(f, at) + sample(f, at - h)) / (h * h);
    case 4:
        return (sample(f, at + 2 * h) - 4.0 * sample(f, at + h) + 6.0 * sample(f, at) -
                4.0 * sample(f, at - h) + sample(f, at - 2 * h)) /
               (h * h * h * h);
    default:
        throw ConfigError("derivative: order must be 1, 2 or 4");
    }
}

} // namespace

DerivResult derivative(const std::function<double(double)>& f, double at, int order) {
    double h = (order == 4) ? 5e-3 : 1e-3;
    // Error series is in h^2 for all three stencils.
    double d0 = stencil(f, at, order, h);
    double d1 = stencil(f, at, order, h / 2.0);
    double d2 = stencil(f, at, order, h / 4.0);
    double r0 = (4.0 * d1 - d0) / 3.0;
    double r1 = (4.0 * d2 - d1) / 3.0;
    double r2 = (16.0 * r1 - r0) / 15.0;
    return {r2, std::fabs(r2 - r1)};
}

const GaussLegendre& gauss_legendre_01(int n) {
    static std::mutex mtx;
    static std::map<int, GaussLegendre> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    if (n < 1) throw ConfigError("gauss_legendre_01: n must be positive");

    GaussLegendre rule;
    rule.nodes.resize(size_t(n));
    rule.weights.resize(size_t(n));
    // Roots of P_n on [-1, 1] by Newton iteration, then map to [0, 1].
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[size_t(i)] = 0.5 * (1.0 - x); // descending root -> ascending node
        rule.weights[size_t(i)] = 0.5 * w;
        rule.nodes[size_t(n - 1 - i)] = 0.5 * (1.0 + x);
        rule.weights[size_t(n - 1 - i)] = 0.5 * w;
    }
    auto [pos, inserted] = cache.emplace(n, std::move(rule));
    (void)inserted;
    return pos->second;
}

double remainder_tilde(const std::function<double(double)>& f2, double z) {
    if (std::fabs(z) > 8.0)
        throw ConfigError("remainder_tilde: |z| <= 8 required, got " + std::to_string(z));
    const GaussLegendre& rule = gauss_legendre_01(32);
    KahanSum acc;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        double t = rule.nodes[i];
        double v = f2(t * z);
        if (!std::isfinite(v)) throw NumericalError("remainder_tilde: non-finite integrand");
        acc.add(rule.weights[i] * v * (1.0 - t));
    }
    return acc.value();
}

} // namespace apbias
