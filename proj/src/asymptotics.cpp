#include "apbias/asymptotics.hpp"
#include "apbias/errors.hpp"
#include "apbias/numerics.hpp"
#include "apbias/parallel.hpp"
#include "apbias/primality.hpp"

#include <cmath>
#include <string>

namespace apbias {

namespace {

using u64 = std::uint64_t;

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= double(i);
    return f;
}

double avg_c(const ResidueSignature& sig, const ConstantsLab& lab) {
    double sum = 0.0;
    for (auto& [b, kb] : sig.parts) sum += double(kb) * lab.bias_constant_C(b);
    return sum / double(sig.k_total());
}

} // namespace

double loglog(u64 x) {
    if (x < 16) throw ConfigError("loglog: x must be >= 16");
    return std::log(std::log(double(x)));
}

double predict_ratio_fixed_k(u64 x, const ResidueSignature& sig, const ConstantsLab& lab) {
    int k = int(sig.k_total());
    if (k < 2) throw ConfigError("predict_ratio_fixed_k: k must be >= 2");
    return 1.0 + (double(k - 1) / loglog(x)) * avg_c(sig, lab);
}

Prediction predict_Mk_same(u64 x, int k, u64 a, const ConstantsLab& lab) {
    if (k < 2 || k > 64) throw ConfigError("predict_Mk_same: k must be in [2, 64]");
    double ll = loglog(x);
    double lx = std::log(double(x));
    double phi = double(lab.table().phi());
    Prediction out;
    out.x = x;
    out.signature = same_class_signature(lab.q(), a, std::uint32_t(k));
    double lead = std::pow(phi, -double(k)) * (double(x) / lx) * std::pow(ll, double(k - 1)) /
                  factorial(k - 1);
    double c_aq = lab.c_aq(a);
    out.main_term = lead;
    out.secondary_term = lead * double(k - 1) * c_aq / ll;
    if (k >= 3) {
        double z = double(k - 3) * phi / ll;
        if (std::fabs(z) <= 8.0) {
            auto h2 = [&lab, a](double w) { return derivative([&lab, a](double v) {
                                                return lab.h_value(a, v);
                                            }, w, 2).value; };
            double tilde = remainder_tilde(h2, z);
            out.third_term =
                lead * double(k - 1) * double(k - 2) * phi * phi * tilde / (ll * ll);
        }
    }
    out.predicted_ratio = 1.0 + double(k - 1) * lab.bias_constant_C(a) / ll;
    out.error_order_note = "O((loglog x)^-2) relative";
    return out;
}

Prediction predict_Sk(u64 x, int k, const ConstantsLab& lab) {
    if (k < 2 || k > 64) throw ConfigError("predict_Sk: k must be in [2, 64]");
    double ll = loglog(x);
    double lx = std::log(double(x));
    Prediction out;
    out.x = x;
    out.signature = ResidueSignature{lab.q(), {}};
    // Leading coefficient uses the exponent k-1; the k-consistent form is
    // forced by the ratio normalization (see README on the S_k expansion).
    double lead = (double(x) / lx) * std::pow(ll, double(k - 1)) / factorial(k - 1);
    double gp0 = lab.gamma() + lab.mertens_b() - lab.sum_recip_q();
    out.main_term = lead;
    out.secondary_term = lead * double(k - 1) * gp0 / ll;
    if (k >= 3) {
        double z = double(k - 3) / ll;
        if (std::fabs(z) <= 8.0) {
            auto g2 = [&lab](double w) { return derivative([&lab](double v) {
                                             return lab.g_value(v);
                                         }, w, 2).value; };
            double tilde = remainder_tilde(g2, z);
            out.third_term = lead * double(k - 1) * double(k - 2) * tilde / (ll * ll);
        }
    }
    out.predicted_ratio = 1.0;
    out.error_order_note = "O((loglog x)^-2) relative";
    return out;
}

double predict_secondary_general(const ResidueSignature& sig, const ConstantsLab& lab) {
    int k = int(sig.k_total());
    if (k < 2) throw ConfigError("predict_secondary_general: k must be >= 2");
    double phi = double(lab.table().phi());
    double denom = 1.0;
    for (auto& [b, kb] : sig.parts) denom *= factorial(int(kb));
    double base = lab.gamma() + lab.mertens_b() + avg_c(sig, lab) - lab.sum_recip_q();
    return std::pow(phi, -double(k)) * double(k) * double(k - 1) / denom * base;
}

std::vector<ComparisonRow> compare(const std::vector<u64>& xs, const ResidueSignature& sig,
                                   const ConstantsLab& lab, const SieveTable& count_sieve,
                                   int workers) {
    int k = int(sig.k_total());
    if (k < 2) throw ConfigError("compare: k must be >= 2");
    std::vector<ComparisonRow> rows(xs.size());
    parallel_chunks(xs.size(), workers, [&](int, u64 begin, u64 end) {
        for (u64 i = begin; i < end; ++i) {
            {
                u64 x = xs[i];
                ComparisonRow row;
                row.x = x;
                row.signature = sig;
                row.exact_Mk = count_M_k(count_sieve, x, sig);
                row.exact_Sk = count_S_k(count_sieve, x, k, sig.q);
                double phi = double(lab.table().phi());
                row.normalized_share = std::pow(phi, -double(k)) * ordering_multinomial(sig) *
                                       double(row.exact_Sk);
                row.observed_ratio = double(row.exact_Mk) / row.normalized_share;
                row.predicted_ratio = predict_ratio_fixed_k(x, sig, lab);
                row.residual_times_loglog = (row.observed_ratio - 1.0) * loglog(x);
                rows[i] = row;
            }
        }
    });
    return rows;
}

PomeranceDiagnostic pomerance_diagnostic(u64 q, u64 a, u64 x, const SieveTable& sieve) {
    if (q < 3) throw ConfigError("pomerance_diagnostic: q must be >= 3");
    a %= q;
    if (gcd_u64(a, q) != 1) throw ConfigError("pomerance_diagnostic: gcd(a, q) must be 1");
    if (x < q || x < 16) throw ConfigError("pomerance_diagnostic: x must be >= max(q, 16)");
    PomeranceDiagnostic d;
    d.q = q;
    d.a = a;
    d.x = x;
    d.least_prime_qa = least_prime(q, a);
    double phi = 0.0;
    for (u64 r = 1; r < q; ++r)
        if (gcd_u64(r, q) == 1) phi += 1.0;
    d.lhs = sieve.reciprocal_sum_in_class(x, q, a) - loglog(x) / phi;
    d.rhs = 1.0 / double(d.least_prime_qa);
    d.gap = d.lhs - d.rhs;
    d.scale = std::log(2.0 * double(q)) / phi;
    return d;
}

} // namespace apbias
