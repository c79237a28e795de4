// Predicted main/secondary/third asymptotic terms and their comparison with
// exact counts, plus the least-prime diagnostic. Predictions use the
// fixed-k expansions; the k ~ A loglog x regime is validated analytically
// through the limit-ratio operations, not by counting.

#pragma once
#include "apbias/counting.hpp"
#include "apbias/lab.hpp"
#include "apbias/signature.hpp"

#include <optional>
#include <string>
#include <vector>

namespace apbias {

struct Prediction {
    std::uint64_t x = 0;
    ResidueSignature signature;
    double main_term = 0.0;
    double secondary_term = 0.0;
    std::optional<double> third_term; // absent for k = 2 or when |z| leaves the quadrature range
    double predicted_ratio = 1.0;
    std::string error_order_note;
};

struct ComparisonRow {
    std::uint64_t x = 0;
    ResidueSignature signature;
    std::uint64_t exact_Mk = 0;
    std::uint64_t exact_Sk = 0;
    double normalized_share = 0.0; // (1/phi^k) k!/(prod k_j!) S_k
    double observed_ratio = 0.0;
    double predicted_ratio = 0.0;
    double residual_times_loglog = 0.0; // (observed - 1) * loglog x
};

struct PomeranceDiagnostic {
    std::uint64_t q = 0, a = 0, x = 0;
    std::uint64_t least_prime_qa = 0;
    double lhs = 0.0;  // sum_{p<=x, p=a mod q} 1/p - loglog(x)/phi(q)
    double rhs = 0.0;  // 1 / p(q, a)
    double gap = 0.0;  // lhs - rhs
    double scale = 0.0; // log(2q)/phi(q), the error-term scale
};

// ln ln x; x < 16 rejected so the value stays positive.
double loglog(std::uint64_t x);

// 1 + ((k-1)/loglog x) * (1/k) sum_j k_j C(q, b_j).
double predict_ratio_fixed_k(std::uint64_t x, const ResidueSignature& sig,
                             const ConstantsLab& lab);

// Fixed-k expansion of M_k(x; a...a) through three terms.
Prediction predict_Mk_same(std::uint64_t x, int k, std::uint64_t a, const ConstantsLab& lab);

// Fixed-k expansion of S_k(x) through three terms.
Prediction predict_Sk(std::uint64_t x, int k, const ConstantsLab& lab);

// Coefficient of (x/log x)(loglog x)^{k-2}:
// (1/phi^k) (k(k-1)/prod k_j!) (gamma + B + (1/k) sum_j k_j C(q,b_j) - sum_{p|q} 1/p).
double predict_secondary_general(const ResidueSignature& sig, const ConstantsLab& lab);

// Exact counts vs prediction for each x.
std::vector<ComparisonRow> compare(const std::vector<std::uint64_t>& xs,
                                   const ResidueSignature& sig, const ConstantsLab& lab,
                                   const SieveTable& count_sieve, int workers = 1);

PomeranceDiagnostic pomerance_diagnostic(std::uint64_t q, std::uint64_t a, std::uint64_t x,
                                         const SieveTable& sieve);

} // namespace apbias
