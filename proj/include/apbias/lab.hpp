// ConstantsLab: everything mod-q-analytic for one modulus: L(1, chi) for all
// non-principal characters with branch-resolved logarithms, the prime sums
// P(chi) = sum_p chi(p)/p, the bias constants C(q, a) and M(q, a), and the
// Euler-product values h(a; z), g(z), u(a; z) in L-factored form.
//
// The heavy lifting is one pass over the sieve primes p <= P1 that buckets
// prime-power sums T[m][class] = sum p^{-m} over three ranges (p <= 257,
// 257 < p <= P0, P0 < p <= P1). Character sums over primes then become
// O(60 * phi) table contractions:
//   sum_p -Log(1 - chi(p)/p) = sum_m (1/m) sum_r chi(r^m) T[m][r].
// Per-prime principal logs and these series agree term by term, so the
// branch-resolved log L is exactly the limit of the per-factor principal
// logs. Euler products expand the same way for p > 257 (where |z|/p < 1/4
// for the supported |z| <= 64) and take direct per-prime logs below.

#pragma once
#include "apbias/characters.hpp"
#include "apbias/sieve.hpp"
#include "apbias/signature.hpp"

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

namespace apbias {

struct LValue {
    std::size_t char_index = 0;
    std::complex<double> value;     // L(1, chi)
    std::complex<double> log_value; // principal log + 2 pi i * winding
    int winding = 0;
    double err_bound = 0.0;
};

struct EulerProductValue {
    std::complex<double> value;
    std::uint64_t truncation_prime = 0; // P0
    double tail_bound = 0.0;
    bool l_factored = false;
};

struct BiasConstants {
    std::uint64_t q = 0;
    std::vector<std::uint64_t> classes; // reduced residues, ascending
    std::vector<double> C;
    std::vector<double> M;
    double gamma = 0.0;
    double B = 0.0;
    double sum_recip_q = 0.0; // sum over p | q of 1/p
    std::uint64_t P0 = 0, P1 = 0;
    double err_estimate = 0.0;
};

struct LimitRatio {
    double value = 0.0;
    double tail_bound = 0.0;
};

class ConstantsLab {
public:
    struct Options {
        std::uint64_t P0 = 1'000'000;  // Euler products / prime-power subtraction cutoff
        std::uint64_t P1 = 10'000'000; // branch-resolution prime sum cutoff
        int workers = 1;
    };

    // 3 <= q <= 1000; sieve must cover P1.
    ConstantsLab(std::uint64_t q, std::shared_ptr<const SieveTable> sieve);
    ConstantsLab(std::uint64_t q, std::shared_ptr<const SieveTable> sieve, const Options& opts);

    std::uint64_t q() const { return q_; }
    const CharacterTable& table() const { return *table_; }
    const Options& options() const { return opts_; }
    double gamma() const;
    double mertens_b() const { return B_; }
    double sum_recip_q() const { return sum_recip_q_; }

    // L(1, chi) by the digamma closed form; chi must be non-principal.
    std::complex<double> l_one(std::size_t chi_index) const;
    // Branch-resolved log L(1, chi).
    const LValue& log_l_one(std::size_t chi_index) const;
    // P(chi) = log L(1, chi) - sum_{p <= P0, m >= 2} chi(p^m)/(m p^m).
    std::complex<double> prime_sum_P(std::size_t chi_index) const;
    double prime_sum_tail_bound() const; // 1 / (P0 ln P0)
    // Partial sum sum_{p <= P1} chi(p)/p (oracle hook).
    std::complex<double> char_partial_recip_sum(std::size_t chi_index) const;

    double bias_constant_C(std::uint64_t a) const;
    double mertens_M(std::uint64_t a) const;
    BiasConstants bias_constants() const;

    // gamma + B - sum_{p|q} 1/p + C(q, a); equals phi(q) h'(a, 0).
    double c_aq(std::uint64_t a) const;

    EulerProductValue euler_g(std::complex<double> z) const;
    EulerProductValue euler_h(std::uint64_t a, std::complex<double> z) const;
    EulerProductValue euler_u(const ResidueSignature& sig,
                              const std::vector<std::complex<double>>& z) const;

    // Real-z conveniences (imaginary residue asserted away).
    double g_value(double z) const;
    double h_value(std::uint64_t a, double z) const;

    // h(a, A phi(q)) / g(A) and u(a; phi(q) e) / g(A).
    LimitRatio limit_ratio_same(std::uint64_t a, double A) const;
    LimitRatio limit_ratio_general(const ResidueSignature& sig, const std::vector<double>& e,
                                   double A) const;

private:
    std::size_t class_of(std::uint64_t a, const char* who) const;
    std::complex<double> log_g1(std::size_t a_class, std::complex<double> z) const;
    std::complex<double> char_power_series(std::size_t chi_index, int min_m, bool include_t3) const;
    void check_gamma_argument(std::complex<double> x, const char* who) const;

    std::uint64_t q_ = 0;
    Options opts_;
    std::shared_ptr<const SieveTable> sieve_;
    std::unique_ptr<CharacterTable> table_;
    std::size_t phi_ = 0;

    std::vector<double> psi_over_q_;  // psi(a/q), a = 1..q-1 (garbage at non-reduced is unused)
    std::vector<std::vector<std::complex<double>>> chi_rows_; // [char][class]
    std::vector<std::vector<std::uint16_t>> pow_class_;       // [m][class] -> class of r^m

    // Prime-power sums T[m][class] = sum p^{-m} over the range, p coprime to q.
    std::vector<std::vector<double>> t1_, t2_, t3_; // p <= 257; (257, P0]; (P0, P1]
    std::vector<double> t23_total_;                 // per m: sum over classes of t2 + t3
    std::vector<std::vector<double>> t23_pow_;      // [m][target]: sum of (t2+t3)[m][r] over r^m = target
    std::vector<std::vector<std::uint32_t>> pow_count_; // [m][target]: #{r : r^m = target}
    std::vector<double> tail_p1_;                   // per m: sum p^{-m} over p > P1 (coprime to q)

    std::vector<std::pair<std::uint64_t, std::size_t>> small_primes_; // (p, class), p <= 257, p coprime to q
    std::vector<std::uint64_t> primes_dividing_q_;
    std::vector<std::vector<std::complex<double>>> small_char_log_; // [small prime][class a]:
                                                                    // sum_chi conj chi(a) Log(1 - chi(p)/p)

    std::vector<LValue> lvalues_;                  // per character (principal slot unused)
    std::vector<std::complex<double>> prime_p_;    // P(chi) per character
    std::vector<std::complex<double>> partial_m1_; // sum_{p<=P1} chi(p)/p per character
    std::vector<double> c_;                        // C(q, a) per class
    double B_ = 0.0;
    double sum_recip_q_ = 0.0;
    int max_m_ = 0;
};

} // namespace apbias
