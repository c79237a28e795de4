#include "apbias/selftest.hpp"
#include "apbias/asymptotics.hpp"
#include "apbias/classic.hpp"
#include "apbias/counting.hpp"
#include "apbias/errors.hpp"
#include "apbias/kahan.hpp"
#include "apbias/lab.hpp"
#include "apbias/numerics.hpp"
#include "apbias/primality.hpp"
#include "apbias/report.hpp"
#include "apbias/sieve.hpp"
#include "apbias/special.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <numbers>
#include <random>

namespace apbias {

namespace {

using u64 = std::uint64_t;

struct Runner {
    SelftestReport report;

    void check(const std::string& name, bool pass, const std::string& detail) {
        report.checks += 1;
        if (!pass) report.failures += 1;
        char num[16];
        std::snprintf(num, sizeof num, "%02d", report.checks);
        report.text += std::string(pass ? "[ ok ] " : "[FAIL] ") + num + " " + name;
        if (!detail.empty()) report.text += "  " + detail;
        report.text += "\n";
    }

    void within(const std::string& name, double got, double want, double tol) {
        check(name, std::fabs(got - want) <= tol,
              "got=" + fmt_g10(got) + " want=" + fmt_g10(want) + " tol=" + fmt_g10(tol));
    }
};

bool trial_division_prime(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

std::string sig_map_str(const std::map<ResidueSignature, u64>& m) {
    std::string out = "{";
    bool first = true;
    for (auto& [sig, cnt] : m) {
        if (!first) out += ",";
        first = false;
        out += sig.str() + ":" + std::to_string(cnt);
    }
    return out + "}";
}

} // namespace

SelftestReport run_selftest(const SelftestOptions& opts) {
    Runner r;
    const double pi = std::numbers::pi;
    r.report.text += "ap-bias-lab selftest (P0=" + std::to_string(opts.P0) +
                     ", P1=" + std::to_string(opts.P1) + ", q={";
    for (std::size_t i = 0; i < opts.moduli.size(); ++i)
        r.report.text += (i ? "," : "") + std::to_string(opts.moduli[i]);
    r.report.text += "})\n";

    SieveOptions sieve_opts;
    sieve_opts.workers = opts.workers;
    sieve_opts.cache_dir = opts.cache_dir;
    auto sieve = std::make_shared<const SieveTable>(
        SieveTable::build(std::max<u64>(opts.P1, 1'000'000), 0, sieve_opts));

    // --- prime engine ---
    r.check("sieve-pi-1e6", sieve->prime_count(1'000'000) == 78498,
            "pi(1e6)=" + std::to_string(sieve->prime_count(1'000'000)));
    {
        bool agree = true;
        u64 first_bad = 0;
        for (u64 n = 0; n <= 20000; ++n) {
            if (sieve->is_prime(n) != trial_division_prime(n)) {
                agree = false;
                first_bad = n;
                break;
            }
        }
        r.check("sieve-vs-trial-division", agree,
                agree ? "n<=20000" : "mismatch at n=" + std::to_string(first_bad));
    }
    {
        SieveOptions small = sieve_opts, large = sieve_opts;
        small.segment_numbers = u64(1) << 14;
        large.segment_numbers = u64(1) << 20;
        auto a = SieveTable::build(1'000'000, 0, SieveOptions{small.segment_numbers, 1, small.memory_budget_bytes, ""});
        auto b = SieveTable::build(1'000'000, 0, SieveOptions{large.segment_numbers, opts.workers, large.memory_budget_bytes, ""});
        r.check("sieve-segment-determinism", a.checksum() == b.checksum(),
                "crc=" + std::to_string(a.checksum()));
    }
    {
        auto s12 = SieveTable::build(1'000'000, 12, SieveOptions{u64(1) << 20, opts.workers, u64(2) << 30, ""});
        u64 sum = 0;
        for (u64 cls : s12.classes()) sum += s12.prime_count_in_class(1'000'000, 12, cls);
        u64 divq = 2; // primes 2, 3 divide 12
        r.check("class-sum-identity-q12", sum + divq == s12.prime_count(1'000'000),
                "sum=" + std::to_string(sum) + " pi=" + std::to_string(s12.prime_count(1'000'000)));
    }
    r.check("least-prime", least_prime(4, 3) == 3 && least_prime(7, 5) == 5 &&
                              least_prime(13, 8) == 47,
            "p(4,3)=3 p(7,5)=5 p(13,8)=47");
    r.within("prime-zeta-2", prime_zeta(2.0), 0.4522474200410655, 1e-12);
    {
        KahanSum direct;
        sieve->for_each_prime(2, 10'000, [&](u64 p) { direct.add(std::pow(double(p), -4.0)); });
        r.within("prime-zeta-4-direct", prime_zeta(4.0), direct.value(), 1e-12);
    }
    {
        bool ok = true;
        for (double s : {2.0, 3.0, 5.0, 8.0, 13.0}) {
            double v = prime_zeta(s);
            double lo = std::pow(2.0, -s);
            double hi = lo + std::pow(3.0, -s) + std::pow(2.0, 1.0 - s);
            if (!(lo < v && v < hi)) ok = false;
        }
        r.check("prime-zeta-bounds", ok, "1/2^s < P(s) < 1/2^s + 1/3^s + 2^(1-s)");
    }
    r.within("mertens-constant", mertens_B() + euler_gamma(), 0.2614972128476428, 1e-9);
    r.check("mertens-B-window", mertens_B() > -0.32 && mertens_B() < -0.31,
            "B=" + fmt_g10(mertens_B()));
    {
        KahanSum h;
        for (u64 k = 1; k <= 1'000'000; ++k) h.add(1.0 / double(k));
        r.within("euler-gamma-harmonic", h.value() - std::log(1e6), euler_gamma(), 1e-6);
    }
    r.within("digamma-half", digamma_rational(1, 2), -euler_gamma() - 2.0 * std::log(2.0), 1e-12);
    r.within("digamma-quarter", digamma_rational(1, 4),
             -euler_gamma() - 3.0 * std::log(2.0) - pi / 2.0, 1e-12);
    {
        bool ok = std::abs(gamma_complex({1.0, 0.0}) - std::complex<double>{1.0, 0.0}) < 1e-13 &&
                  std::abs(gamma_complex({5.0, 0.0}) - std::complex<double>{24.0, 0.0}) < 2e-12 &&
                  std::abs(gamma_complex({0.5, 0.0}).real() - std::sqrt(pi)) < 1e-13 &&
                  std::abs(gamma_complex({1.5, 0.0}).real() - 0.8862269254527580) < 1e-12;
        r.check("gamma-function-values", ok, "1, 24, sqrt(pi), sqrt(pi)/2");
    }

    // --- characters ---
    std::map<u64, std::unique_ptr<CharacterTable>> tables;
    for (u64 q : opts.moduli) tables.emplace(q, std::make_unique<CharacterTable>(q));
    {
        bool ok = true;
        std::string detail;
        for (auto& [q, table] : tables) {
            double tol = q >= 100 ? 1e-11 : 1e-12;
            double defect = table->orthogonality_defect();
            if (defect >= tol) ok = false;
            detail += "q" + std::to_string(q) + "=" + fmt_g10(defect) + " ";
        }
        r.check("character-orthogonality", ok, detail);
    }
    {
        bool ok = true;
        std::mt19937 rng(12345);
        for (auto& [q, table] : tables) {
            const auto& residues = table->group().residues;
            std::uniform_int_distribution<std::size_t> pick(0, residues.size() - 1);
            for (int trial = 0; trial < 50; ++trial) {
                u64 m = residues[pick(rng)], n = residues[pick(rng)];
                const auto& chi = table->at(trial % table->size());
                Turn tm, tn, tmn;
                chi.turn_at(m, tm);
                chi.turn_at(n, tn);
                chi.turn_at(m * n % q, tmn);
                // exact rational angle addition mod 1
                std::int64_t den = tm.den * tn.den;
                std::int64_t num = (tm.num * tn.den + tn.num * tm.den) % den;
                if (num * tmn.den != tmn.num * den) ok = false;
            }
        }
        r.check("character-multiplicativity-exact", ok, "random reduced pairs, exact turns");
    }

    // --- constants lab ---
    std::map<u64, std::unique_ptr<ConstantsLab>> labs;
    ConstantsLab::Options lab_opts;
    lab_opts.P0 = opts.P0;
    lab_opts.P1 = opts.P1;
    lab_opts.workers = opts.workers;
    for (u64 q : opts.moduli) labs.emplace(q, std::make_unique<ConstantsLab>(q, sieve, lab_opts));

    if (labs.count(4)) {
        const auto& lab = *labs.at(4);
        std::size_t idx = 1; // the nonprincipal character mod 4
        r.within("L-one-mod4", lab.l_one(idx).real(), pi / 4.0, 1e-10);
    }
    if (labs.count(3)) {
        const auto& lab = *labs.at(3);
        r.within("L-one-mod3", lab.l_one(1).real(), pi / (3.0 * std::sqrt(3.0)), 1e-10);
    }
    {
        bool ok = true;
        double worst = 0.0;
        for (auto& [q, lab] : labs) {
            for (std::size_t i = 0; i < lab->table().size(); ++i) {
                if (i == lab->table().principal_index()) continue;
                const LValue& lv = lab->log_l_one(i);
                double defect = std::abs(std::exp(lv.log_value) - lv.value);
                worst = std::max(worst, defect);
                if (defect >= 1e-12) ok = false;
            }
        }
        r.check("exp-log-L-consistency", ok, "worst=" + fmt_g10(worst));
    }
    {
        bool ok = true;
        double worst = 0.0;
        for (auto& [q, lab] : labs) {
            for (std::size_t i = 0; i < lab->table().size(); ++i) {
                if (i == lab->table().principal_index()) continue;
                std::size_t j = lab->table().conjugate_index(i);
                double defect = std::abs(lab->prime_sum_P(i) - std::conj(lab->prime_sum_P(j)));
                worst = std::max(worst, defect);
                if (defect >= 1e-10) ok = false;
            }
        }
        r.check("prime-sum-conjugation", ok, "worst=" + fmt_g10(worst));
    }
    {
        struct Entry {
            u64 q, a;
            double want, tol;
        };
        const Entry entries[] = {
            {3, 2, 0.641945, 1e-5},  {3, 1, -0.641945, 1e-5},  {4, 3, 0.334981, 1e-5},
            {4, 1, -0.334981, 1e-5}, {7, 2, 1.83747, 1e-4},    {7, 5, 0.159006, 1e-4},
            {7, 6, -0.946269, 1e-4}, {13, 3, 2.68478, 1e-4},   {13, 6, -0.846522, 1e-4},
            {13, 8, -1.31962, 1e-4},
        };
        bool ok = true;
        std::string detail;
        for (const auto& e : entries) {
            if (!labs.count(e.q)) continue;
            double got = labs.at(e.q)->bias_constant_C(e.a);
            if (std::fabs(got - e.want) > e.tol) {
                ok = false;
                detail += "C(" + std::to_string(e.q) + "," + std::to_string(e.a) +
                          ")=" + fmt_g10(got) + "!=" + fmt_g10(e.want) + " ";
            }
        }
        r.check("bias-constants-table", ok, ok ? "ten reference values" : detail);
    }
    {
        bool ok_c = true, ok_m = true;
        std::string detail;
        for (auto& [q, lab] : labs) {
            BiasConstants bc = lab->bias_constants();
            KahanSum cs, ms;
            for (double c : bc.C) cs.add(c);
            for (double m : bc.M) ms.add(m);
            double want_m = bc.gamma + bc.B - bc.sum_recip_q;
            if (std::fabs(cs.value()) >= 1e-9) ok_c = false;
            if (std::fabs(ms.value() - want_m) >= 1e-9) ok_m = false;
            detail += "q" + std::to_string(q) + ":sumC=" + fmt_g10(cs.value()) + " ";
        }
        r.check("sum-rule-C", ok_c, detail);
        r.check("sum-rule-M", ok_m, "sum M = gamma + B - sum 1/p per modulus");
    }
    if (labs.count(4)) {
        const auto& lab = *labs.at(4);
        std::complex<double> partial{0.0, 0.0};
        for (std::size_t i = 0; i < lab.table().size(); ++i) {
            if (i == lab.table().principal_index()) continue;
            std::size_t a_class = 1; // residue 3 mod 4
            partial += std::conj(lab.table().at(i).value_at_class(a_class)) *
                       lab.char_partial_recip_sum(i);
        }
        r.within("C-partial-sum-oracle", partial.real(), lab.bias_constant_C(3), 0.05);
    }
    {
        bool ok = true;
        for (auto& [q, lab] : labs) {
            if (lab->euler_g(0.0).value != std::complex<double>{1.0, 0.0}) ok = false;
            u64 a = lab->table().group().residues[0];
            if (lab->euler_h(a, 0.0).value != std::complex<double>{1.0, 0.0}) ok = false;
        }
        r.check("euler-products-at-zero", ok, "g(0) = h(a;0) = 1 exactly");
    }
    if (labs.count(4)) {
        r.within("euler-g-of-1-mod4", labs.at(4)->g_value(1.0), 4.0 / (pi * pi), 1e-10);
    }
    {
        bool ok = true;
        std::string detail;
        for (u64 q : {u64(3), u64(4)}) {
            if (!labs.count(q)) continue;
            const auto& lab = *labs.at(q);
            double want = lab.gamma() + lab.mertens_b() - lab.sum_recip_q();
            double got = derivative([&lab](double z) { return lab.g_value(z); }, 0.0, 1).value;
            if (std::fabs(got - want) > 1e-8) ok = false;
            detail += "q" + std::to_string(q) + ":g'(0)=" + fmt_g10(got) + " ";
        }
        r.check("g-prime-identity", ok, detail);
    }
    {
        bool ok = true;
        std::string detail;
        for (auto [q, a] : {std::pair<u64, u64>{4, 3}, {7, 3}}) {
            if (!labs.count(q)) continue;
            const auto& lab = *labs.at(q);
            double phi = double(lab.table().phi());
            double hp = derivative([&lab, a2 = a](double z) { return lab.h_value(a2, z); }, 0.0, 1).value;
            double gp = derivative([&lab](double z) { return lab.g_value(z); }, 0.0, 1).value;
            double got = phi * hp - gp;
            double want = lab.bias_constant_C(a);
            if (std::fabs(got - want) > 1e-6) ok = false;
            detail += "phi*h'-g'(" + std::to_string(q) + "," + std::to_string(a) +
                      ")=" + fmt_g10(got) + " C=" + fmt_g10(want) + " ";
        }
        r.check("two-path-C-identity", ok, detail);
    }
    {
        bool ok = true;
        std::string detail;
        for (u64 q : {u64(4), u64(7)}) {
            if (!labs.count(q)) continue;
            const auto& lab = *labs.at(q);
            ResidueSignature sig;
            sig.q = q;
            std::vector<double> e;
            double A = 1.0;
            const auto& residues = lab.table().group().residues;
            for (u64 b : residues) sig.parts.emplace_back(b, 1);
            e.assign(residues.size(), A / double(residues.size()));
            double ratio = lab.limit_ratio_general(sig, e, A).value;
            if (std::fabs(ratio - 1.0) > 1e-9) ok = false;
            detail += "q" + std::to_string(q) + ":ratio=" + fmt_g10(ratio) + " ";
        }
        r.check("full-coverage-ratio-one", ok, detail);
    }
    if (labs.count(4)) {
        const auto& lab = *labs.at(4);
        double phi = double(lab.table().phi());
        auto log_ratio = [&](double A) {
            return std::log(lab.h_value(3, A * phi)) - std::log(lab.g_value(A));
        };
        double step = 1e-4;
        double d = (log_ratio(step) - log_ratio(-step)) / (2.0 * step);
        r.within("ratio-log-derivative-is-C", d, lab.bias_constant_C(3), 1e-6);
    }
    {
        // P0 -> 4 P0 stability against the recorded tail bound
        ConstantsLab::Options bigger = lab_opts;
        bigger.P0 = 4 * lab_opts.P0;
        bool ok = true;
        std::string detail;
        if (labs.count(4) && bigger.P0 <= opts.P1) {
            ConstantsLab lab4(4, sieve, bigger);
            const auto& lab = *labs.at(4);
            for (double z : {1.0, 2.5}) {
                EulerProductValue a = lab.euler_g(z), b = lab4.euler_g(z);
                if (std::abs(a.value - b.value) > a.tail_bound) ok = false;
                EulerProductValue ha = lab.euler_h(3, z), hb = lab4.euler_h(3, z);
                if (std::abs(ha.value - hb.value) > ha.tail_bound) ok = false;
            }
            detail = "g/h moves under recorded tail bound";
        }
        r.check("tail-bound-stability", ok, detail);
    }

    // --- exact counts ---
    {
        auto s4 = SieveTable::build(required_sieve_limit(1'000'000, 2, 4), 4,
                                    SieveOptions{u64(1) << 20, opts.workers, u64(2) << 30, ""});
        u64 s2_100 = count_S_k(s4, 100, 2, 4);
        u64 m33 = count_M_k(s4, 100, parse_signature("3^2", 4));
        u64 m11 = count_M_k(s4, 100, parse_signature("1^2", 4));
        u64 m13 = count_M_k(s4, 100, parse_signature("1*3", 4));
        r.check("counts-x100-q4", s2_100 == 16 && m33 == 6 && m11 == 2 && m13 == 8,
                "S=" + std::to_string(s2_100) + " M(3,3)=" + std::to_string(m33) +
                    " M(1,1)=" + std::to_string(m11) + " M(1,3)=" + std::to_string(m13));
        auto all = count_all_signatures(s4, 100, 2, 4);
        u64 sum = 0;
        for (auto& [sig, cnt] : all) sum += cnt;
        r.check("partition-identity-x100", sum == s2_100, sig_map_str(all));

        u64 s2_1e6 = count_S_k(s4, 1'000'000, 2, 4);
        auto all6 = count_all_signatures(s4, 1'000'000, 2, 4);
        u64 sum6 = 0;
        for (auto& [sig, cnt] : all6) sum6 += cnt;
        r.check("partition-identity-x1e6", sum6 == s2_1e6,
                "S_2(1e6)=" + std::to_string(s2_1e6));
    }
    {
        auto brute30 = brute_force_counts(30, 2, 3);
        auto want = std::map<ResidueSignature, u64>{
            {parse_signature("1*2", 3), 2},
            {parse_signature("2^2", 3), 2},
        };
        r.check("brute-force-x30-q3", brute30 == want, sig_map_str(brute30));
    }
    {
        bool ok = true;
        std::string detail;
        for (u64 q : {u64(3), u64(4)}) {
            for (int k : {2, 3}) {
                u64 x = 10'000;
                auto s = SieveTable::build(required_sieve_limit(x, k, q), q,
                                           SieveOptions{u64(1) << 14, opts.workers, u64(2) << 30, ""});
                auto enumerated = count_all_signatures(s, x, k, q);
                auto brute = brute_force_counts(x, k, q);
                if (enumerated != brute) {
                    ok = false;
                    detail += "mismatch q=" + std::to_string(q) + " k=" + std::to_string(k) + " ";
                }
            }
        }
        r.check("oracle-equivalence-1e4", ok, ok ? "enumeration == SPF brute force" : detail);
    }
    {
        auto empty = count_all_signatures(
            SieveTable::build(required_sieve_limit(50, 3, 4), 4,
                              SieveOptions{u64(1) << 14, 1, u64(2) << 30, ""}),
            50, 3, 4);
        r.check("empty-map-x50-k3", empty.empty(), "3*5*7=105 > 50");
    }

    // --- asymptotics ---
    if (labs.count(4)) {
        const auto& lab = *labs.at(4);
        auto s4 = SieveTable::build(required_sieve_limit(1'000'000, 2, 4), 4,
                                    SieveOptions{u64(1) << 20, opts.workers, u64(2) << 30, ""});
        auto rows = compare({100'000, 1'000'000}, parse_signature("3^2", 4), lab, s4,
                            opts.workers);
        bool sign_ok = true;
        for (auto& row : rows)
            if (!(row.observed_ratio > 1.0)) sign_ok = false;
        auto rows11 = compare({100'000, 1'000'000}, parse_signature("1^2", 4), lab, s4,
                              opts.workers);
        for (auto& row : rows11)
            if (!(row.observed_ratio < 1.0)) sign_ok = false;
        r.check("bias-sign-law-q4", sign_ok,
                "ratio(3,3)>1>" + fmt_g10(rows11.back().observed_ratio) + "=ratio(1,1)");
        auto rows13 = compare({1'000'000}, parse_signature("1*3", 4), lab, s4, opts.workers);
        bool balanced = std::fabs(rows13[0].observed_ratio - 1.0) <
                            std::fabs(rows[1].observed_ratio - 1.0) &&
                        std::fabs(rows13[0].observed_ratio - 1.0) <
                            std::fabs(rows11[1].observed_ratio - 1.0);
        r.check("balanced-signature-nearest-one", balanced,
                "ratio(1,3)=" + fmt_g10(rows13[0].observed_ratio));
        double secondary_general = predict_secondary_general(parse_signature("3^2", 4), lab);
        double phi = double(lab.table().phi());
        double same_class_coeff = std::pow(phi, -2.0) * lab.c_aq(3); // k=2: k(k-1)/k! = 1
        r.within("secondary-coefficient-consistency", secondary_general, same_class_coeff, 1e-6);
    }
    {
        auto d = pomerance_diagnostic(13, 8, 1'000'000, *sieve);
        r.check("pomerance-rhs-13-8", d.least_prime_qa == 47, "p(13,8)=" +
                                                                 std::to_string(d.least_prime_qa));
        auto d43 = pomerance_diagnostic(4, 3, std::min<u64>(sieve->limit(), 10'000'000), *sieve);
        r.check("pomerance-gap-4-3", std::fabs(d43.gap) < 1.04,
                "gap=" + fmt_g10(d43.gap) + " scale=" + fmt_g10(d43.scale));
    }

    r.report.text += "selftest: " + std::to_string(r.report.checks) + " checks, " +
                     std::to_string(r.report.failures) + " failed\n";
    return r.report;
}

} // namespace apbias
