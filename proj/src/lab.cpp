#include "apbias/lab.hpp"
#include "apbias/classic.hpp"
#include "apbias/errors.hpp"
#include "apbias/kahan.hpp"
#include "apbias/parallel.hpp"
#include "apbias/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace apbias {

namespace {

using u64 = std::uint64_t;
using cd = std::complex<double>;

constexpr u64 kSmallPrimeCut = 257; // direct per-prime logs below, 1/p series above
constexpr int kM1 = 62;             // power-table depth for p <= 257 (2^-62 < 1e-18)
constexpr int kM23 = 9;             // depth for p > 257 (263^-9 < 1e-21)
constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_nonpositive_integer(cd x) {
    return x.imag() == 0.0 && x.real() <= 0.0 && x.real() == std::floor(x.real());
}

} // namespace

ConstantsLab::ConstantsLab(u64 q, std::shared_ptr<const SieveTable> sieve)
    : ConstantsLab(q, std::move(sieve), Options{}) {}

ConstantsLab::ConstantsLab(u64 q, std::shared_ptr<const SieveTable> sieve, const Options& opts)
    : q_(q), opts_(opts), sieve_(std::move(sieve)) {
    if (q < 3 || q > 1000)
        throw ConfigError("ConstantsLab: supported modulus range is 3..1000, got " +
                          std::to_string(q));
    if (opts_.P0 < 1000) throw ConfigError("ConstantsLab: P0 must be >= 1000");
    if (opts_.P1 < opts_.P0) throw ConfigError("ConstantsLab: P1 must be >= P0");
    if (!sieve_ || sieve_->limit() < opts_.P1)
        throw ConfigError("ConstantsLab: sieve limit must cover P1=" + std::to_string(opts_.P1));

    table_ = std::make_unique<CharacterTable>(q);
    phi_ = size_t(table_->phi());
    const auto& group = table_->group();

    B_ = mertens_B();
    {
        KahanSum s;
        for (auto [p, pe] : group.prime_powers) s.add(1.0 / double(p));
        sum_recip_q_ = s.value();
        primes_dividing_q_.clear();
        for (auto [p, pe] : group.prime_powers) primes_dividing_q_.push_back(p);
    }

    psi_over_q_.assign(size_t(q), 0.0);
    for (u64 a = 1; a < q; ++a) psi_over_q_[size_t(a)] = digamma_rational(std::int64_t(a), std::int64_t(q));

    chi_rows_.resize(phi_);
    for (std::size_t i = 0; i < phi_; ++i) {
        chi_rows_[i].resize(phi_);
        for (std::size_t ci = 0; ci < phi_; ++ci) chi_rows_[i][ci] = table_->at(i).value_at_class(ci);
    }

    max_m_ = kM1;
    pow_class_.assign(size_t(max_m_) + 1, {});
    for (int m = 1; m <= max_m_; ++m) pow_class_[size_t(m)].resize(phi_);
    for (std::size_t ci = 0; ci < phi_; ++ci) {
        u64 r = group.residues[ci];
        u64 v = r;
        pow_class_[1][ci] = std::uint16_t(ci);
        for (int m = 2; m <= max_m_; ++m) {
            v = v * r % q;
            pow_class_[size_t(m)][ci] = std::uint16_t(group.residue_index[size_t(v)]);
        }
    }

    // One pass over sieve primes, bucketing p^-m by range, power and class.
    auto alloc = [&](std::vector<std::vector<double>>& t, int depth) {
        t.assign(size_t(depth) + 1, {});
        for (int m = 1; m <= depth; ++m) t[size_t(m)].assign(phi_, 0.0);
    };
    alloc(t1_, kM1);
    alloc(t2_, kM23);
    alloc(t3_, kM23);
    std::vector<std::vector<KahanSum>> acc1(kM1 + 1, std::vector<KahanSum>(phi_));
    std::vector<std::vector<KahanSum>> acc2(kM23 + 1, std::vector<KahanSum>(phi_));
    std::vector<std::vector<KahanSum>> acc3(kM23 + 1, std::vector<KahanSum>(phi_));
    small_primes_.clear();
    sieve_->for_each_prime(2, opts_.P1, [&](u64 p) {
        if (q % p == 0) return;
        std::size_t ci = size_t(group.residue_index[size_t(p % q)]);
        auto& acc = p <= kSmallPrimeCut ? acc1 : (p <= opts_.P0 ? acc2 : acc3);
        int depth = p <= kSmallPrimeCut ? kM1 : kM23;
        if (p <= kSmallPrimeCut) small_primes_.emplace_back(p, ci);
        double val = 1.0 / double(p);
        for (int m = 1; m <= depth && val > 1e-19; ++m) {
            acc[size_t(m)][ci].add(val);
            val /= double(p);
        }
    });
    for (int m = 1; m <= kM1; ++m)
        for (std::size_t ci = 0; ci < phi_; ++ci) t1_[size_t(m)][ci] = acc1[size_t(m)][ci].value();
    for (int m = 1; m <= kM23; ++m)
        for (std::size_t ci = 0; ci < phi_; ++ci) {
            t2_[size_t(m)][ci] = acc2[size_t(m)][ci].value();
            t3_[size_t(m)][ci] = acc3[size_t(m)][ci].value();
        }

    t23_total_.assign(kM23 + 1, 0.0);
    t23_pow_.assign(kM23 + 1, std::vector<double>(phi_, 0.0));
    pow_count_.assign(kM23 + 1, std::vector<std::uint32_t>(phi_, 0));
    for (int m = 2; m <= kM23; ++m) {
        KahanSum tot;
        for (std::size_t ci = 0; ci < phi_; ++ci) {
            double v = t2_[size_t(m)][ci] + t3_[size_t(m)][ci];
            tot.add(v);
            std::size_t target = pow_class_[size_t(m)][ci];
            t23_pow_[size_t(m)][target] += v;
            pow_count_[size_t(m)][target] += 1;
        }
        t23_total_[size_t(m)] = tot.value();
    }

    // Beyond-P1 tail per power: only m = 2, 3 rise above the rounding floor
    // of the prime_zeta(m) - covered difference; the true tails decay like
    // P1^(1-m), so everything from m = 4 on is dropped (bounded by the
    // recorded tail estimates). Each value is clamped by an a-priori bound so
    // cancellation noise can never leak into the z^m series.
    tail_p1_.assign(kM23 + 1, 0.0);
    for (int m = 2; m <= 3; ++m) {
        KahanSum covered;
        for (std::size_t ci = 0; ci < phi_; ++ci) {
            covered.add(t1_[size_t(m)][ci]);
            covered.add(t2_[size_t(m)][ci]);
            covered.add(t3_[size_t(m)][ci]);
        }
        for (u64 p : primes_dividing_q_) covered.add(std::pow(double(p), -double(m)));
        double tail = prime_zeta(double(m)) - covered.value();
        double apriori = 2.0 * std::pow(double(opts_.P1), 1.0 - double(m)) /
                         ((double(m) - 1.0) * std::log(double(opts_.P1)));
        tail_p1_[size_t(m)] = std::min(std::max(0.0, tail), apriori);
    }

    // Per small prime: sum_chi conj chi(a) Log(1 - chi(p)/p), all characters.
    small_char_log_.assign(small_primes_.size(), {});
    for (std::size_t sp = 0; sp < small_primes_.size(); ++sp) {
        auto [p, pci] = small_primes_[sp];
        std::vector<cd> logfac(phi_);
        for (std::size_t i = 0; i < phi_; ++i)
            logfac[i] = std::log(1.0 - chi_rows_[i][pci] / double(p));
        small_char_log_[sp].assign(phi_, cd{0.0, 0.0});
        for (std::size_t a = 0; a < phi_; ++a) {
            KahanComplexSum s;
            for (std::size_t i = 0; i < phi_; ++i) s.add(std::conj(chi_rows_[i][a]) * logfac[i]);
            small_char_log_[sp][a] = s.value();
        }
    }

    // L(1, chi), branch-resolved log, P(chi) per non-principal character.
    lvalues_.assign(phi_, LValue{});
    prime_p_.assign(phi_, cd{0.0, 0.0});
    partial_m1_.assign(phi_, cd{0.0, 0.0});
    parallel_chunks(phi_, opts_.workers, [&](int, u64 begin, u64 end) {
        for (u64 i = begin; i < end; ++i) {
            if (i == table_->principal_index()) continue;
            {
                const auto& row = chi_rows_[size_t(i)];
                KahanComplexSum lsum;
                for (std::size_t ci = 0; ci < phi_; ++ci)
                    lsum.add(row[ci] * psi_over_q_[size_t(table_->group().residues[ci])]);
                cd L = -lsum.value() / double(q_);
                const auto& chi = table_->at(size_t(i));
                if (chi.is_real()) {
                    if (std::fabs(L.imag()) > 1e-10 || L.real() <= 0.0)
                        throw NumericalError("l_one: real character must give real positive L");
                    L = cd{L.real(), 0.0};
                }
                cd S = char_power_series(size_t(i), 1, true);
                double arg = std::atan2(L.imag(), L.real());
                double ln_abs = std::log(std::abs(L));
                long w = std::lround((S.imag() - arg) / kTwoPi);
                cd log_value{ln_abs, arg + kTwoPi * double(w)};
                if (std::fabs(S.imag() - log_value.imag()) >= 1.0)
                    throw NumericalError(
                        "log_l_one: branch resolution uncertain for character " +
                        std::to_string(i) + " mod " + std::to_string(q_));
                LValue lv;
                lv.char_index = size_t(i);
                lv.value = L;
                lv.log_value = log_value;
                lv.winding = int(w);
                lv.err_bound =
                    std::max(1e-14, double(q_) * 1e-16 / std::max(std::abs(L), 0.1));
                lvalues_[size_t(i)] = lv;
                prime_p_[size_t(i)] = log_value - char_power_series(size_t(i), 2, false);
                KahanComplexSum m1;
                for (std::size_t ci = 0; ci < phi_; ++ci)
                    m1.add(row[ci] * (t1_[1][ci] + t2_[1][ci] + t3_[1][ci]));
                partial_m1_[size_t(i)] = m1.value();
            }
        }
    });

    // C(q, a) = Re sum_{chi != chi0} conj chi(a) P(chi).
    c_.assign(phi_, 0.0);
    for (std::size_t a = 0; a < phi_; ++a) {
        KahanComplexSum s;
        for (std::size_t i = 0; i < phi_; ++i) {
            if (i == table_->principal_index()) continue;
            s.add(std::conj(chi_rows_[i][a]) * prime_p_[i]);
        }
        cd v = s.value();
        if (std::fabs(v.imag()) >= 1e-9)
            throw NumericalError("bias_constant_C: imaginary residue " +
                                 std::to_string(v.imag()) + " for a=" +
                                 std::to_string(table_->group().residues[a]));
        c_[a] = v.real();
    }
}

double ConstantsLab::gamma() const { return euler_gamma(); }

// sum over m of (1/m) sum_ci chi(r^m) T[m][ci], with T the union of the
// requested ranges. min_m = 1 gives the branch series; min_m = 2 with
// include_t3 = false gives the prime-power subtraction for P(chi).
cd ConstantsLab::char_power_series(std::size_t chi_index, int min_m, bool include_t3) const {
    const auto& row = chi_rows_[chi_index];
    KahanComplexSum acc;
    for (int m = min_m; m <= max_m_; ++m) {
        const auto& pc = pow_class_[size_t(m)];
        KahanComplexSum inner;
        for (std::size_t ci = 0; ci < phi_; ++ci) {
            double t = t1_[size_t(m)][ci];
            if (m <= kM23) {
                t += t2_[size_t(m)][ci];
                if (include_t3) t += t3_[size_t(m)][ci];
            }
            if (t != 0.0) inner.add(row[pc[ci]] * t);
        }
        acc.add(inner.value() / double(m));
    }
    return acc.value();
}

std::size_t ConstantsLab::class_of(u64 a, const char* who) const {
    a %= q_;
    int idx = table_->group().residue_index[size_t(a)];
    if (idx < 0)
        throw ConfigError(std::string(who) + ": residue " + std::to_string(a) +
                          " is not coprime to q=" + std::to_string(q_));
    return size_t(idx);
}

cd ConstantsLab::l_one(std::size_t chi_index) const {
    if (chi_index == table_->principal_index())
        throw ConfigError("l_one: L(1, chi0) has a pole");
    return lvalues_[chi_index].value;
}

const LValue& ConstantsLab::log_l_one(std::size_t chi_index) const {
    if (chi_index == table_->principal_index())
        throw ConfigError("log_l_one: principal character not allowed");
    return lvalues_[chi_index];
}

cd ConstantsLab::prime_sum_P(std::size_t chi_index) const {
    if (chi_index == table_->principal_index())
        throw ConfigError("prime_sum_P: principal character not allowed");
    return prime_p_[chi_index];
}

double ConstantsLab::prime_sum_tail_bound() const {
    return 1.0 / (double(opts_.P0) * std::log(double(opts_.P0)));
}

cd ConstantsLab::char_partial_recip_sum(std::size_t chi_index) const {
    return partial_m1_[chi_index];
}

double ConstantsLab::bias_constant_C(u64 a) const { return c_[class_of(a, "bias_constant_C")]; }

double ConstantsLab::mertens_M(u64 a) const {
    return (bias_constant_C(a) + gamma() + B_ - sum_recip_q_) / double(phi_);
}

double ConstantsLab::c_aq(u64 a) const {
    return gamma() + B_ - sum_recip_q_ + bias_constant_C(a);
}

BiasConstants ConstantsLab::bias_constants() const {
    BiasConstants out;
    out.q = q_;
    out.classes = table_->group().residues;
    out.C.resize(phi_);
    out.M.resize(phi_);
    for (std::size_t ci = 0; ci < phi_; ++ci) {
        out.C[ci] = c_[ci];
        out.M[ci] = (c_[ci] + gamma() + B_ - sum_recip_q_) / double(phi_);
    }
    out.gamma = gamma();
    out.B = B_;
    out.sum_recip_q = sum_recip_q_;
    out.P0 = opts_.P0;
    out.P1 = opts_.P1;
    out.err_estimate = double(phi_) * prime_sum_tail_bound() + 1e-12;
    return out;
}

void ConstantsLab::check_gamma_argument(cd x, const char* who) const {
    if (is_nonpositive_integer(x))
        throw ConfigError(std::string(who) + ": gamma pole at argument " +
                          std::to_string(x.real()));
}

EulerProductValue ConstantsLab::euler_g(cd z) const {
    if (std::abs(z) > 64.0) throw ConfigError("euler_g: |z| <= 64 required");
    check_gamma_argument(z + 1.0, "euler_g");
    EulerProductValue out;
    out.truncation_prime = opts_.P0;
    out.l_factored = false;
    double zn = std::abs(z);
    out.tail_bound = (1.0 + zn) * (1.0 + zn) / (double(opts_.P0) * std::log(double(opts_.P0)));
    if (z == cd{0.0, 0.0}) {
        out.value = cd{1.0, 0.0};
        out.tail_bound = 0.0;
        return out;
    }
    KahanComplexSum lng;
    for (u64 p : primes_dividing_q_) lng.add(z * std::log(1.0 - 1.0 / double(p)));
    for (auto [p, ci] : small_primes_) {
        lng.add(z * std::log(1.0 - 1.0 / double(p)) + std::log(1.0 + z / double(p)));
    }
    // p > 257: per-prime log expands as sum_{m>=2} ((-1)^{m-1} z^m - z)/m * p^-m
    cd zpow = z;
    double sign = -1.0; // (-1)^{m-1} for m = 2
    for (int m = 2; m <= kM23; ++m) {
        zpow *= z;
        double total = t23_total_[size_t(m)] + tail_p1_[size_t(m)];
        if (total != 0.0) lng.add((sign * zpow - z) / double(m) * total);
        sign = -sign;
    }
    out.value = std::exp(lng.value()) / gamma_complex(z + 1.0);
    return out;
}

cd ConstantsLab::log_g1(std::size_t a_class, cd z) const {
    KahanComplexSum lng1;
    const double phi = double(phi_);
    for (std::size_t sp = 0; sp < small_primes_.size(); ++sp) {
        auto [p, pci] = small_primes_[sp];
        if (pci == a_class) lng1.add(std::log(1.0 + z / double(p)));
        lng1.add(z / phi * small_char_log_[sp][a_class]);
    }
    cd zpow = z;
    double sign = -1.0;
    for (int m = 2; m <= kM23; ++m) {
        zpow *= z;
        double same = t2_[size_t(m)][a_class] + t3_[size_t(m)][a_class];
        double powsum = t23_pow_[size_t(m)][a_class];
        lng1.add((sign * zpow * same - z * powsum) / double(m));
        if (tail_p1_[size_t(m)] != 0.0) {
            double n_m = double(pow_count_[size_t(m)][a_class]);
            // classes are equidistributed beyond P1 at this accuracy scale
            lng1.add((sign * zpow - z * n_m) / double(m) * (tail_p1_[size_t(m)] / phi));
        }
        sign = -sign;
    }
    return lng1.value();
}

EulerProductValue ConstantsLab::euler_h(u64 a, cd z) const {
    if (std::abs(z) > 64.0) throw ConfigError("euler_h: |z| <= 64 required");
    std::size_t a_class = class_of(a, "euler_h");
    const double phi = double(phi_);
    check_gamma_argument(z / phi + 1.0, "euler_h");
    EulerProductValue out;
    out.truncation_prime = opts_.P0;
    out.l_factored = true;
    double zn = std::abs(z);
    out.tail_bound = (1.0 + zn) * (1.0 + zn) / (double(opts_.P0) * std::log(double(opts_.P0)));
    if (z == cd{0.0, 0.0}) {
        out.value = cd{1.0, 0.0};
        out.tail_bound = 0.0;
        return out;
    }
    KahanComplexSum lnh;
    for (u64 p : primes_dividing_q_) lnh.add(z / phi * std::log(1.0 - 1.0 / double(p)));
    for (std::size_t i = 0; i < phi_; ++i) {
        if (i == table_->principal_index()) continue;
        lnh.add(std::conj(chi_rows_[i][a_class]) * z / phi * lvalues_[i].log_value);
    }
    lnh.add(log_g1(a_class, z));
    out.value = std::exp(lnh.value()) / gamma_complex(z / phi + 1.0);
    return out;
}

EulerProductValue ConstantsLab::euler_u(const ResidueSignature& sig,
                                        const std::vector<cd>& z) const {
    if (sig.q != q_) throw ConfigError("euler_u: signature modulus mismatch");
    if (z.size() != sig.parts.size())
        throw ConfigError("euler_u: need one z per distinct class");
    const double phi = double(phi_);
    cd zsum{0.0, 0.0};
    for (cd zj : z) {
        if (std::abs(zj) > 64.0) throw ConfigError("euler_u: |z_j| <= 64 required");
        zsum += zj;
    }
    if (std::abs(zsum) > 64.0) throw ConfigError("euler_u: |sum z_j| <= 64 required");
    check_gamma_argument(zsum / phi + 1.0, "euler_u");
    EulerProductValue out;
    out.truncation_prime = opts_.P0;
    out.l_factored = true;
    double zn = std::abs(zsum);
    out.tail_bound = double(z.size()) * (1.0 + zn) * (1.0 + zn) /
                     (double(opts_.P0) * std::log(double(opts_.P0)));
    bool all_zero = true;
    for (cd zj : z)
        if (zj != cd{0.0, 0.0}) all_zero = false;
    if (all_zero) {
        out.value = cd{1.0, 0.0};
        out.tail_bound = 0.0;
        return out;
    }
    KahanComplexSum lnh;
    for (u64 p : primes_dividing_q_) lnh.add(zsum / phi * std::log(1.0 - 1.0 / double(p)));
    for (std::size_t i = 0; i < phi_; ++i) {
        if (i == table_->principal_index()) continue;
        KahanComplexSum w;
        for (std::size_t j = 0; j < z.size(); ++j) {
            std::size_t b_class = class_of(sig.parts[j].first, "euler_u");
            w.add(std::conj(chi_rows_[i][b_class]) * z[j]);
        }
        lnh.add(w.value() / phi * lvalues_[i].log_value);
    }
    for (std::size_t j = 0; j < z.size(); ++j) {
        if (z[j] == cd{0.0, 0.0}) continue; // empty factor contributes log 1
        lnh.add(log_g1(class_of(sig.parts[j].first, "euler_u"), z[j]));
    }
    out.value = std::exp(lnh.value()) / gamma_complex(zsum / phi + 1.0);
    return out;
}

namespace {

double require_real(cd v, const char* who) {
    if (std::fabs(v.imag()) > 1e-9 * (1.0 + std::abs(v)))
        throw NumericalError(std::string(who) + ": unexpected imaginary part " +
                             std::to_string(v.imag()));
    return v.real();
}

} // namespace

double ConstantsLab::g_value(double z) const { return require_real(euler_g(z).value, "g_value"); }

double ConstantsLab::h_value(u64 a, double z) const {
    return require_real(euler_h(a, z).value, "h_value");
}

LimitRatio ConstantsLab::limit_ratio_same(u64 a, double A) const {
    if (A < 0.0) throw ConfigError("limit_ratio_same: A must be >= 0");
    EulerProductValue h = euler_h(a, A * double(phi_));
    EulerProductValue g = euler_g(A);
    double value = require_real(h.value / g.value, "limit_ratio_same");
    LimitRatio out;
    out.value = value;
    out.tail_bound = std::fabs(value) * (h.tail_bound + g.tail_bound);
    return out;
}

LimitRatio ConstantsLab::limit_ratio_general(const ResidueSignature& sig,
                                             const std::vector<double>& e, double A) const {
    if (e.size() != sig.parts.size())
        throw ConfigError("limit_ratio_general: need one exponent per class");
    double sum = 0.0;
    for (double ej : e) {
        if (ej < 0.0) throw ConfigError("limit_ratio_general: e_j must be >= 0");
        sum += ej;
    }
    if (std::fabs(sum - A) > 1e-12)
        throw ConfigError("limit_ratio_general: sum of e_j must equal A");
    std::vector<cd> z;
    z.reserve(e.size());
    for (double ej : e) z.emplace_back(double(phi_) * ej, 0.0);
    EulerProductValue u = euler_u(sig, z);
    EulerProductValue g = euler_g(A);
    double value = require_real(u.value / g.value, "limit_ratio_general");
    LimitRatio out;
    out.value = value;
    out.tail_bound = std::fabs(value) * (u.tail_bound + g.tail_bound);
    return out;
}

} // namespace apbias
