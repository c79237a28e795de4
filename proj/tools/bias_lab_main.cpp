// bias-lab: arithmetic-progression bias laboratory.
//
// Subcommands: constants | count | compare | euler-ratio | diagnose |
// characters | selftest. Exit codes: 0 ok, 2 usage, 3 numerical
// consistency, 4 resource guard.

#include "apbias/asymptotics.hpp"
#include "apbias/classic.hpp"
#include "apbias/counting.hpp"
#include "apbias/errors.hpp"
#include "apbias/lab.hpp"
#include "apbias/parallel.hpp"
#include "apbias/report.hpp"
#include "apbias/selftest.hpp"
#include "apbias/sieve.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

namespace {

using namespace apbias;
using u64 = std::uint64_t;

constexpr const char* kSchema = "ap-bias-lab/v1";

struct GlobalConfig {
    std::string format = "table";
    std::string cache_dir;
    int workers = default_workers();
    u64 p0 = 1'000'000;
    u64 p1 = 10'000'000;
    u64 mem_budget = u64(2) << 30;
    bool timings = false;
};

u64 parse_x(const std::string& text) {
    try {
        double v = std::stod(text);
        if (!std::isfinite(v) || v < 0.0) throw ConfigError("x out of range: " + text);
        // beyond 2^63 the magnitude itself is the problem, not the syntax
        if (v > 9.2e18)
            throw ResourceError("x = " + text + " is far over any in-budget sieve size");
        return u64(std::floor(v));
    } catch (const ConfigError&) {
        throw;
    } catch (const ResourceError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse x value '" + text + "'");
    }
}

SieveOptions sieve_options(const GlobalConfig& g) {
    SieveOptions o;
    o.workers = g.workers;
    o.memory_budget_bytes = g.mem_budget;
    o.cache_dir = g.cache_dir;
    return o;
}

ConstantsLab::Options lab_options(const GlobalConfig& g) {
    ConstantsLab::Options o;
    o.P0 = g.p0;
    o.P1 = g.p1;
    o.workers = g.workers;
    return o;
}

std::shared_ptr<const SieveTable> lab_sieve(const GlobalConfig& g) {
    return std::make_shared<const SieveTable>(
        SieveTable::build(std::max<u64>(g.p1, 1'000'000), 0, sieve_options(g)));
}

std::string cfg_json(const GlobalConfig& g, bool with_workers = true) {
    JsonWriter w;
    w.begin_object()
        .field("format", g.format)
        .field("P0", g.p0)
        .field("P1", g.p1)
        .field("mem_budget", g.mem_budget);
    if (with_workers) w.field("workers", std::uint64_t(g.workers));
    w.end_object();
    return w.str();
}

int cmd_constants(const GlobalConfig& g, const std::vector<u64>& qs) {
    auto sieve = lab_sieve(g);
    std::vector<BiasConstants> results;
    for (u64 q : qs) {
        ConstantsLab lab(q, sieve, lab_options(g));
        results.push_back(lab.bias_constants());
    }
    if (g.format == "csv") {
        std::string out = "q,a,C,M,err\n";
        for (const auto& bc : results) {
            for (std::size_t i = 0; i < bc.classes.size(); ++i) {
                out += std::to_string(bc.q) + "," + std::to_string(bc.classes[i]) + "," +
                       fmt_g10(bc.C[i]) + "," + fmt_g10(bc.M[i]) + "," +
                       fmt_g10(bc.err_estimate) + "\n";
            }
        }
        std::fputs(out.c_str(), stdout);
        return 0;
    }
    if (g.format == "json") {
        JsonWriter w;
        w.begin_object()
            .field("schema", std::string(kSchema))
            .field("command", std::string("constants"))
            .field_raw("cfg", cfg_json(g))
            .begin_array("results");
        for (const auto& bc : results) {
            w.begin_object_in_array()
                .field("q", bc.q)
                .field("gamma", bc.gamma)
                .field("B", bc.B)
                .field("sum_recip_q", bc.sum_recip_q);
            JsonWriter cw, mw;
            cw.begin_object();
            mw.begin_object();
            for (std::size_t i = 0; i < bc.classes.size(); ++i) {
                cw.field(std::to_string(bc.classes[i]), bc.C[i]);
                mw.field(std::to_string(bc.classes[i]), bc.M[i]);
            }
            cw.end_object();
            mw.end_object();
            w.field_raw("C", cw.str()).field_raw("M", mw.str());
            JsonWriter cut;
            cut.begin_object().field("P0", bc.P0).field("P1", bc.P1).end_object();
            w.field_raw("cutoffs", cut.str()).field("err", bc.err_estimate).end_object();
        }
        w.end_array().end_object();
        std::fputs((w.str() + "\n").c_str(), stdout);
        return 0;
    }
    for (const auto& bc : results) {
        std::printf("q=%llu  gamma=%s  B=%s  sum_{p|q}1/p=%s  err<=%s  (P0=%llu, P1=%llu)\n",
                    (unsigned long long)bc.q, fmt_g10(bc.gamma).c_str(), fmt_g10(bc.B).c_str(),
                    fmt_g10(bc.sum_recip_q).c_str(), fmt_g10(bc.err_estimate).c_str(),
                    (unsigned long long)bc.P0, (unsigned long long)bc.P1);
        std::printf("%6s %16s %16s\n", "a", "C(q,a)", "M(q,a)");
        for (std::size_t i = 0; i < bc.classes.size(); ++i) {
            std::printf("%6llu %16s %16s\n", (unsigned long long)bc.classes[i],
                        fmt_g10(bc.C[i]).c_str(), fmt_g10(bc.M[i]).c_str());
        }
    }
    return 0;
}

struct CountRow {
    u64 x;
    int k;
    u64 q;
    std::string signature;
    u64 count;
    double elapsed_ms;
    u64 nodes;
    std::string method = "enumeration";
};

void emit_count_rows(const GlobalConfig& g, const std::vector<CountRow>& rows) {
    if (g.format == "json") {
        JsonWriter w;
        w.begin_object()
            .field("schema", std::string(kSchema))
            .field("command", std::string("count"))
            .field_raw("cfg", cfg_json(g))
            .begin_array("results");
        for (const auto& r : rows) {
            w.begin_object_in_array()
                .field("x", r.x)
                .field("k", std::uint64_t(r.k))
                .field("q", r.q)
                .field("signature", r.signature)
                .field("count", r.count)
                .field("method", r.method)
                .field("elapsed_ms", r.elapsed_ms)
                .field("nodes", r.nodes)
                .end_object();
        }
        w.end_array().end_object();
        std::fputs((w.str() + "\n").c_str(), stdout);
        return;
    }
    if (g.format == "csv") {
        std::string out = "x,k,q,signature,count,elapsed_ms,nodes\n";
        for (const auto& r : rows) {
            out += std::to_string(r.x) + "," + std::to_string(r.k) + "," + std::to_string(r.q) +
                   "," + r.signature + "," + std::to_string(r.count) + "," +
                   fmt_g10(r.elapsed_ms) + "," + std::to_string(r.nodes) + "\n";
        }
        std::fputs(out.c_str(), stdout);
        return;
    }
    for (const auto& r : rows) {
        std::printf("x=%llu k=%d q=%llu sig=%s count=%llu nodes=%llu\n", (unsigned long long)r.x,
                    r.k, (unsigned long long)r.q, r.signature.c_str(),
                    (unsigned long long)r.count, (unsigned long long)r.nodes);
    }
}

int cmd_count(const GlobalConfig& g, const std::vector<std::string>& x_texts, u64 q,
              const std::string& sig_text, int k, bool all) {
    if (sig_text.empty() && !all)
        throw ConfigError("count: give --sig or --k with --all");
    std::vector<CountRow> rows;
    auto now = [] { return std::chrono::steady_clock::now(); };
    auto ms = [&](auto t0, auto t1) {
        return g.timings ? std::chrono::duration<double, std::milli>(t1 - t0).count() : 0.0;
    };
    for (const std::string& x_text : x_texts) {
        u64 x = parse_x(x_text);
        if (!sig_text.empty()) {
            std::string warn;
            ResidueSignature sig = parse_signature(sig_text, q, &warn);
            if (!warn.empty()) std::fprintf(stderr, "warning: %s\n", warn.c_str());
            int kk = int(sig.k_total());
            ensure_count_budget(x, kk, q, g.mem_budget);
            u64 need = required_sieve_limit(x, kk, q);
            auto sieve = SieveTable::build(need, q, sieve_options(g));
            CountStats stats;
            auto t0 = now();
            u64 count = count_M_k(sieve, x, sig, &stats, g.workers);
            rows.push_back({x, kk, q, sig.str(), count, ms(t0, now()), stats.nodes});
        } else {
            if (k < 1) throw ConfigError("count: --k must be >= 1 with --all");
            ensure_count_budget(x, k, q, g.mem_budget);
            u64 need = required_sieve_limit(x, k, q);
            auto sieve = SieveTable::build(need, q, sieve_options(g));
            CountStats stats;
            auto t0 = now();
            u64 s = count_S_k(sieve, x, k, q, &stats, g.workers);
            rows.push_back({x, k, q, "all-coprime", s, ms(t0, now()), stats.nodes});
            t0 = now();
            auto by_sig = count_all_signatures(sieve, x, k, q, &stats, g.workers);
            double all_ms = ms(t0, now());
            for (auto& [sig, cnt] : by_sig) {
                rows.push_back({x, k, q, sig.str(), cnt, all_ms, stats.nodes});
            }
        }
    }
    emit_count_rows(g, rows);
    return 0;
}

int cmd_compare(const GlobalConfig& g, const std::vector<std::string>& x_texts, u64 q,
                const std::string& sig_text) {
    std::string warn;
    ResidueSignature sig = parse_signature(sig_text, q, &warn);
    if (!warn.empty()) std::fprintf(stderr, "warning: %s\n", warn.c_str());
    std::vector<u64> xs;
    for (const auto& t : x_texts) xs.push_back(parse_x(t));
    auto sieve = lab_sieve(g);
    ConstantsLab lab(q, sieve, lab_options(g));
    u64 max_x = *std::max_element(xs.begin(), xs.end());
    ensure_count_budget(max_x, int(sig.k_total()), q, g.mem_budget);
    u64 need = required_sieve_limit(max_x, int(sig.k_total()), q);
    auto count_sieve = SieveTable::build(need, q, sieve_options(g));
    auto rows = compare(xs, sig, lab, count_sieve, g.workers);
    if (g.format == "csv") {
        std::string out = "x,signature,exact_Mk,exact_Sk,normalized_share,observed_ratio,"
                          "predicted_ratio,residual_times_loglog\n";
        for (const auto& r : rows) {
            out += std::to_string(r.x) + "," + r.signature.str() + "," +
                   std::to_string(r.exact_Mk) + "," + std::to_string(r.exact_Sk) + "," +
                   fmt_g10(r.normalized_share) + "," + fmt_g10(r.observed_ratio) + "," +
                   fmt_g10(r.predicted_ratio) + "," + fmt_g10(r.residual_times_loglog) + "\n";
        }
        std::fputs(out.c_str(), stdout);
        return 0;
    }
    if (g.format == "json") {
        JsonWriter w;
        w.begin_object()
            .field("schema", std::string(kSchema))
            .field("command", std::string("compare"))
            .field_raw("cfg", cfg_json(g))
            .field("q", q)
            .field("signature", sig.str())
            .begin_array("rows");
        for (const auto& r : rows) {
            w.begin_object_in_array()
                .field("x", r.x)
                .field("exact_Mk", r.exact_Mk)
                .field("exact_Sk", r.exact_Sk)
                .field("normalized_share", r.normalized_share)
                .field("observed_ratio", r.observed_ratio)
                .field("predicted_ratio", r.predicted_ratio)
                .field("residual_times_loglog", r.residual_times_loglog)
                .end_object();
        }
        w.end_array().end_object();
        std::fputs((w.str() + "\n").c_str(), stdout);
        return 0;
    }
    std::printf("q=%llu sig=%s\n", (unsigned long long)q, sig.str().c_str());
    std::printf("%12s %12s %12s %14s %14s %14s\n", "x", "M_k", "S_k", "observed", "predicted",
                "resid*loglog");
    for (const auto& r : rows) {
        std::printf("%12llu %12llu %12llu %14s %14s %14s\n", (unsigned long long)r.x,
                    (unsigned long long)r.exact_Mk, (unsigned long long)r.exact_Sk,
                    fmt_g10(r.observed_ratio).c_str(), fmt_g10(r.predicted_ratio).c_str(),
                    fmt_g10(r.residual_times_loglog).c_str());
    }
    return 0;
}

int cmd_euler_ratio(const GlobalConfig& g, u64 q, u64 a, double A, const std::string& sig_text,
                    const std::vector<double>& e) {
    auto sieve = lab_sieve(g);
    ConstantsLab lab(q, sieve, lab_options(g));
    LimitRatio ratio;
    std::string mode, sig_str;
    if (!sig_text.empty()) {
        std::string warn;
        ResidueSignature sig = parse_signature(sig_text, q, &warn);
        if (!warn.empty()) std::fprintf(stderr, "warning: %s\n", warn.c_str());
        if (e.empty()) throw ConfigError("euler-ratio: --e values required with --sig");
        ratio = lab.limit_ratio_general(sig, e, A);
        mode = "general";
        sig_str = sig.str();
    } else {
        ratio = lab.limit_ratio_same(a, A);
        mode = "same-class";
        sig_str = std::to_string(a);
    }
    if (g.format == "json") {
        JsonWriter w;
        w.begin_object()
            .field("schema", std::string(kSchema))
            .field("command", std::string("euler-ratio"))
            .field_raw("cfg", cfg_json(g))
            .field("q", q)
            .field("mode", mode)
            .field("target", sig_str)
            .field("A", A)
            .field("value", ratio.value)
            .field("tail_bound", ratio.tail_bound)
            .end_object();
        std::fputs((w.str() + "\n").c_str(), stdout);
    } else {
        std::printf("q=%llu %s target=%s A=%s value=%s tail_bound=%s\n", (unsigned long long)q,
                    mode.c_str(), sig_str.c_str(), fmt_g10(A).c_str(), fmt_g10(ratio.value).c_str(),
                    fmt_g10(ratio.tail_bound).c_str());
    }
    return 0;
}

int cmd_diagnose(const GlobalConfig& g, u64 q, u64 a, const std::string& x_text) {
    u64 x = parse_x(x_text);
    u64 limit = std::max<u64>(std::max<u64>(x, g.p1), 1'000'000);
    auto sieve = SieveTable::build(limit, 0, sieve_options(g));
    auto d = pomerance_diagnostic(q, a, x, sieve);
    if (g.format == "json") {
        JsonWriter w;
        w.begin_object()
            .field("schema", std::string(kSchema))
            .field("command", std::string("diagnose"))
            .field_raw("cfg", cfg_json(g))
            .field("q", d.q)
            .field("a", d.a)
            .field("x", d.x)
            .field("least_prime", d.least_prime_qa)
            .field("lhs", d.lhs)
            .field("rhs", d.rhs)
            .field("gap", d.gap)
            .field("error_scale", d.scale)
            .end_object();
        std::fputs((w.str() + "\n").c_str(), stdout);
    } else {
        std::printf("q=%llu a=%llu x=%llu p(q,a)=%llu\n", (unsigned long long)d.q,
                    (unsigned long long)d.a, (unsigned long long)d.x,
                    (unsigned long long)d.least_prime_qa);
        std::printf("lhs = sum 1/p - loglog(x)/phi = %s\n", fmt_g10(d.lhs).c_str());
        std::printf("rhs = 1/p(q,a)               = %s\n", fmt_g10(d.rhs).c_str());
        std::printf("gap = %s   (error scale log(2q)/phi = %s)\n", fmt_g10(d.gap).c_str(),
                    fmt_g10(d.scale).c_str());
    }
    return 0;
}

int cmd_characters(const GlobalConfig& g, u64 q) {
    CharacterTable table(q);
    if (g.format == "table") {
        std::printf("q=%llu phi=%llu components=", (unsigned long long)q,
                    (unsigned long long)table.phi());
        const auto& group = table.group();
        for (std::size_t i = 0; i < group.orders.size(); ++i) {
            std::printf("%sC%llu(g=%llu)", i ? " x " : "", (unsigned long long)group.orders[i],
                        (unsigned long long)group.generators[i]);
        }
        std::printf("\northogonality defect = %s\n", fmt_g10(table.orthogonality_defect()).c_str());
        return 0;
    }
    std::fputs((table.to_json() + "\n").c_str(), stdout);
    return 0;
}

int cmd_selftest(const GlobalConfig& g, const std::vector<u64>& extra_q) {
    SelftestOptions opts;
    for (u64 q : extra_q) opts.moduli.push_back(q);
    opts.P0 = g.p0;
    opts.P1 = g.p1;
    opts.workers = g.workers;
    opts.cache_dir = g.cache_dir;
    SelftestReport report = run_selftest(opts);
    std::fputs(report.text.c_str(), stdout);
    return report.all_pass() ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"arithmetic-progression bias laboratory"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalConfig g;
    app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "csv", "table"}));
    app.add_option("--cache-dir", g.cache_dir, "sieve bitset cache directory (or BIAS_LAB_CACHE_DIR)");
    app.add_option("--workers", g.workers, "worker cap for parallel stages")->check(CLI::Range(1, 256));
    app.add_option("--p0", g.p0, "Euler-product / prime-power cutoff P0");
    app.add_option("--p1", g.p1, "branch-resolution prime cutoff P1");
    app.add_option("--mem-budget", g.mem_budget, "sieve bitset budget in bytes");
    app.add_flag("--timings", g.timings, "include wall-clock timings in reports");

    auto* constants = app.add_subcommand("constants", "bias constants C(q,a), M(q,a)");
    constants->fallthrough();
    std::vector<u64> qs;
    constants->add_option("--q", qs, "modulus (repeatable)")->required();

    auto* count = app.add_subcommand("count", "exact counts of k-almost-primes by residue class");
    count->fallthrough();
    std::vector<std::string> count_x;
    std::string count_sig;
    u64 count_q = 0;
    int count_k = 0;
    bool count_all = false;
    count->add_option("--x", count_x, "upper bound, repeatable (scientific notation ok)")->required();
    count->add_option("--q", count_q, "modulus")->required();
    count->add_option("--sig", count_sig, "residue signature, e.g. 3^2 or 1*3");
    count->add_option("--k", count_k, "number of prime factors (with --all)");
    count->add_flag("--all", count_all, "count S_k and every signature");

    auto* comparec = app.add_subcommand("compare", "exact counts vs predicted ratios");
    comparec->fallthrough();
    std::vector<std::string> compare_x;
    std::string compare_sig;
    u64 compare_q = 0;
    comparec->add_option("--x", compare_x, "x values (repeatable)")->required();
    comparec->add_option("--q", compare_q, "modulus")->required();
    comparec->add_option("--sig", compare_sig, "residue signature")->required();

    auto* ratio = app.add_subcommand("euler-ratio", "k ~ A loglog x Euler-product limits");
    ratio->fallthrough();
    u64 ratio_q = 0, ratio_a = 1;
    double ratio_A = 1.0;
    std::string ratio_sig;
    std::vector<double> ratio_e;
    ratio->add_option("--q", ratio_q, "modulus")->required();
    ratio->add_option("--a", ratio_a, "residue class (same-class mode)");
    ratio->add_option("--A", ratio_A, "limit of k / loglog x")->required();
    ratio->add_option("--sig", ratio_sig, "signature (general mode)");
    ratio->add_option("--e", ratio_e, "per-class e_j limits (general mode)");

    auto* diagnose = app.add_subcommand("diagnose", "least-prime diagnostic for M(q,a)");
    diagnose->fallthrough();
    u64 diag_q = 0, diag_a = 0;
    std::string diag_x;
    diagnose->add_option("--q", diag_q, "modulus")->required();
    diagnose->add_option("--a", diag_a, "residue class")->required();
    diagnose->add_option("--x", diag_x, "cutoff")->required();

    auto* characters = app.add_subcommand("characters", "character table export");
    characters->fallthrough();
    u64 chars_q = 0;
    characters->add_option("--q", chars_q, "modulus")->required();

    auto* selftest = app.add_subcommand("selftest", "run the invariant suite");
    selftest->fallthrough();
    std::vector<u64> selftest_q;
    selftest->add_option("--q", selftest_q, "extra moduli to include");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(constants)) return cmd_constants(g, qs);
        if (app.got_subcommand(count)) return cmd_count(g, count_x, count_q, count_sig, count_k, count_all);
        if (app.got_subcommand(comparec)) return cmd_compare(g, compare_x, compare_q, compare_sig);
        if (app.got_subcommand(ratio)) return cmd_euler_ratio(g, ratio_q, ratio_a, ratio_A, ratio_sig, ratio_e);
        if (app.got_subcommand(diagnose)) return cmd_diagnose(g, diag_q, diag_a, diag_x);
        if (app.got_subcommand(characters)) return cmd_characters(g, chars_q);
        if (app.got_subcommand(selftest)) return cmd_selftest(g, selftest_q);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const ResourceError& e) {
        std::fprintf(stderr, "resource guard: %s\n", e.what());
        return 4;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical consistency: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
