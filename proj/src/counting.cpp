#include "apbias/counting.hpp"
#include "apbias/errors.hpp"
#include "apbias/parallel.hpp"
#include "apbias/primality.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

namespace apbias {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 isqrt_u64(u64 n) {
    u64 r = u64(std::sqrt(double(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

// P * p^slots <= x without overflow.
bool completion_fits(u64 P, u64 p, int slots, u64 x) {
    u128 t = P;
    for (int i = 0; i < slots; ++i) {
        t *= p;
        if (t > x) return false;
    }
    return true;
}

void validate_inputs(const SieveTable& sieve, u64 x, int k, u64 q) {
    if (q < 3) throw ConfigError("count: q must be >= 3");
    if (k < 1 || k > 64) throw ConfigError("count: k must be in [1, 64]");
    if (sieve.attached_modulus() != q)
        throw ConfigError("count: sieve must be attached to modulus q=" + std::to_string(q));
    u64 need = required_sieve_limit(x, k, q);
    if (sieve.limit() < need)
        throw ConfigError("count: sieve limit " + std::to_string(sieve.limit()) +
                          " insufficient, need " + std::to_string(need));
}

// Usable interior primes (coprime to q) up to sqrt(x), with class indices.
void collect_base(const SieveTable& sieve, u64 x, u64 q, std::vector<u64>& primes,
                  std::vector<int>& cls) {
    primes.clear();
    cls.clear();
    sieve.for_each_prime(2, isqrt_u64(x), [&](u64 p) {
        if (q % p == 0) return;
        primes.push_back(p);
        cls.push_back(sieve.class_of(p % q));
    });
}

u64 count_primes_dividing_q_in(u64 q, u64 lo, u64 hi) {
    u64 c = 0;
    for (u64 p = 2; p * p <= q; ++p) {
        if (q % p == 0) {
            if (p > lo && p <= hi) ++c;
            while (q % p == 0) q /= p;
        }
    }
    if (q > 1 && q > lo && q <= hi) ++c;
    return c;
}

} // namespace

u64 required_sieve_limit(u64 x, int k, u64 q) {
    if (x < 3) return 3;
    if (k == 1) return x;
    // product of the k-1 smallest primes coprime to q, saturating at x
    u64 prod = 1;
    int found = 0;
    for (u64 p = 2; found < k - 1; ++p) {
        if (!is_prime_u64(p)) continue;
        if (q % p == 0) continue;
        ++found;
        if (prod > x / p) {
            prod = x; // saturation: no k-tuple fits under x anyway
            break;
        }
        prod *= p;
    }
    u64 hi = std::max(x / prod, isqrt_u64(x) + 1);
    return std::max<u64>(hi, 3);
}

void ensure_count_budget(u64 x, int k, u64 q, u64 memory_budget_bytes) {
    u64 need = required_sieve_limit(x, k, q);
    u64 nbits = need < 3 ? 0 : (need - 3) / 2 + 1;
    u64 bytes = (nbits + 63) / 64 * 8;
    if (bytes > memory_budget_bytes)
        throw ResourceError("count: sieve to " + std::to_string(need) + " needs about " +
                            std::to_string(bytes) + " bytes, over the " +
                            std::to_string(memory_budget_bytes) + "-byte budget");
}

u64 count_S_k(const SieveTable& sieve, u64 x, int k, u64 q, CountStats* stats, int workers) {
    validate_inputs(sieve, x, k, q);
    std::atomic<u64> nodes{0};
    if (x < 2) {
        if (stats) stats->nodes = 0;
        return 0;
    }
    auto coprime_range = [&](u64 lo, u64 hi) -> u64 {
        if (hi <= lo) return 0;
        u64 c = sieve.prime_count(hi) - sieve.prime_count(lo);
        return c - count_primes_dividing_q_in(q, lo, hi);
    };
    if (k == 1) {
        if (stats) stats->nodes = 1;
        return coprime_range(0, x);
    }

    std::vector<u64> base;
    std::vector<int> cls;
    collect_base(sieve, x, q, base, cls);

    struct Rec {
        const std::vector<u64>& base;
        u64 x;
        const decltype(coprime_range)& leaf;
        std::atomic<u64>& nodes;
        u64 run(std::size_t idx, int slots, u64 P, u64 prev) {
            if (slots == 1) {
                nodes.fetch_add(1, std::memory_order_relaxed);
                return leaf(prev, x / P);
            }
            u64 total = 0;
            for (std::size_t i = idx; i < base.size(); ++i) {
                u64 p = base[i];
                if (!completion_fits(P, p, slots, x)) break;
                nodes.fetch_add(1, std::memory_order_relaxed);
                total += run(i + 1, slots - 1, P * p, p);
            }
            return total;
        }
    } rec{base, x, coprime_range, nodes};

    std::vector<u64> partial(base.size(), 0);
    parallel_chunks(base.size(), workers, [&](int, u64 begin, u64 end) {
        for (u64 i = begin; i < end; ++i) {
            u64 p = base[i];
            if (!completion_fits(1, p, k, x)) continue;
            nodes.fetch_add(1, std::memory_order_relaxed);
            partial[i] = rec.run(i + 1, k - 1, p, p);
        }
    });
    u64 total = 0;
    for (u64 v : partial) total += v;
    if (stats) stats->nodes = nodes.load();
    return total;
}

u64 count_M_k(const SieveTable& sieve, u64 x, const ResidueSignature& sig, CountStats* stats,
              int workers) {
    const u64 q = sig.q;
    const int k = int(sig.k_total());
    validate_inputs(sieve, x, k, q);
    if (x < 2) {
        if (stats) stats->nodes = 0;
        return 0;
    }
    std::vector<std::uint32_t> target(sieve.classes().size(), 0);
    for (auto& [b, kb] : sig.parts) {
        int c = sieve.class_of(b % q);
        if (c < 0) throw ConfigError("count_M_k: signature residue not coprime to q");
        target[size_t(c)] += kb;
    }
    if (k == 1) {
        if (stats) stats->nodes = 1;
        return sieve.prime_count_in_class(x, q, sig.parts[0].first);
    }

    std::vector<u64> base;
    std::vector<int> cls;
    collect_base(sieve, x, q, base, cls);
    std::atomic<u64> nodes{0};

    struct Rec {
        const SieveTable& sieve;
        const std::vector<u64>& base;
        const std::vector<int>& cls;
        u64 x, q;
        std::atomic<u64>& nodes;
        u64 run(std::size_t idx, int slots, u64 P, u64 prev, std::vector<std::uint32_t>& rem) {
            if (slots == 1) {
                nodes.fetch_add(1, std::memory_order_relaxed);
                std::size_t last = 0;
                while (rem[last] == 0) ++last;
                u64 r = sieve.classes()[last];
                u64 hi = x / P;
                if (hi <= prev) return 0;
                return sieve.prime_count_in_class(hi, q, r) -
                       sieve.prime_count_in_class(prev, q, r);
            }
            u64 total = 0;
            for (std::size_t i = idx; i < base.size(); ++i) {
                u64 p = base[i];
                if (!completion_fits(P, p, slots, x)) break;
                std::size_t c = size_t(cls[i]);
                if (rem[c] == 0) continue;
                nodes.fetch_add(1, std::memory_order_relaxed);
                --rem[c];
                total += run(i + 1, slots - 1, P * p, p, rem);
                ++rem[c];
            }
            return total;
        }
    } rec{sieve, base, cls, x, q, nodes};

    std::vector<u64> partial(base.size(), 0);
    parallel_chunks(base.size(), workers, [&](int, u64 begin, u64 end) {
        std::vector<std::uint32_t> rem = target;
        for (u64 i = begin; i < end; ++i) {
            u64 p = base[i];
            if (!completion_fits(1, p, k, x)) continue;
            std::size_t c = size_t(cls[i]);
            if (rem[c] == 0) continue;
            nodes.fetch_add(1, std::memory_order_relaxed);
            --rem[c];
            partial[i] = rec.run(i + 1, k - 1, p, p, rem);
            ++rem[c];
        }
    });
    u64 total = 0;
    for (u64 v : partial) total += v;
    if (stats) stats->nodes = nodes.load();
    return total;
}

std::map<ResidueSignature, std::uint64_t> count_all_signatures(const SieveTable& sieve, u64 x,
                                                               int k, u64 q, CountStats* stats,
                                                               int workers) {
    validate_inputs(sieve, x, k, q);
    const std::size_t phi = sieve.classes().size();
    // Signature-space guard: C(phi + k - 1, k) must stay tabulable.
    double space = 1.0;
    for (int i = 1; i <= k; ++i) space *= double(phi + u64(k) - u64(i)) / double(i);
    if (space > 1e6)
        throw ResourceError("count_all_signatures: signature space " + std::to_string(space) +
                            " exceeds 10^6");
    using Map = std::map<ResidueSignature, std::uint64_t>;
    Map out;
    if (x < 2) {
        if (stats) stats->nodes = 0;
        return out;
    }

    auto make_sig = [&](const std::vector<std::uint32_t>& counts) {
        ResidueSignature sig;
        sig.q = q;
        for (std::size_t c = 0; c < counts.size(); ++c) {
            if (counts[c]) sig.parts.emplace_back(sieve.classes()[c], counts[c]);
        }
        return sig;
    };

    std::atomic<u64> nodes{0};
    if (k == 1) {
        auto counts = sieve.class_counts_upto(x);
        std::vector<std::uint32_t> pref(phi, 0);
        for (std::size_t c = 0; c < phi; ++c) {
            if (!counts[c]) continue;
            pref[c] = 1;
            out[make_sig(pref)] = counts[c];
            pref[c] = 0;
        }
        if (stats) stats->nodes = 1;
        return out;
    }

    std::vector<u64> base;
    std::vector<int> cls;
    collect_base(sieve, x, q, base, cls);

    struct Rec {
        const SieveTable& sieve;
        const std::vector<u64>& base;
        const std::vector<int>& cls;
        u64 x;
        std::atomic<u64>& nodes;
        void run(std::size_t idx, int slots, u64 P, u64 prev, std::vector<std::uint32_t>& pref,
                 Map& local, const std::function<ResidueSignature(const std::vector<std::uint32_t>&)>& sig_of) {
            if (slots == 1) {
                nodes.fetch_add(1, std::memory_order_relaxed);
                u64 hi = x / P;
                if (hi <= prev) return;
                auto hi_counts = sieve.class_counts_upto(hi);
                auto lo_counts = sieve.class_counts_upto(prev);
                for (std::size_t c = 0; c < pref.size(); ++c) {
                    u64 cnt = hi_counts[c] - lo_counts[c];
                    if (!cnt) continue;
                    ++pref[c];
                    local[sig_of(pref)] += cnt;
                    --pref[c];
                }
                return;
            }
            for (std::size_t i = idx; i < base.size(); ++i) {
                u64 p = base[i];
                if (!completion_fits(P, p, slots, x)) break;
                nodes.fetch_add(1, std::memory_order_relaxed);
                std::size_t c = size_t(cls[i]);
                ++pref[c];
                run(i + 1, slots - 1, P * p, p, pref, local, sig_of);
                --pref[c];
            }
        }
    } rec{sieve, base, cls, x, nodes};

    int nchunks = workers < 1 ? 1 : workers;
    std::vector<Map> locals(static_cast<std::size_t>(nchunks));
    parallel_chunks(base.size(), nchunks, [&](int chunk, u64 begin, u64 end) {
        std::vector<std::uint32_t> pref(phi, 0);
        for (u64 i = begin; i < end; ++i) {
            u64 p = base[i];
            if (!completion_fits(1, p, k, x)) continue;
            nodes.fetch_add(1, std::memory_order_relaxed);
            std::size_t c = size_t(cls[i]);
            ++pref[c];
            rec.run(i + 1, k - 1, p, p, pref, locals[size_t(chunk)], make_sig);
            --pref[c];
        }
    });
    for (auto& local : locals) {
        for (auto& [sig, cnt] : local) out[sig] += cnt;
    }
    if (stats) stats->nodes = nodes.load();
    return out;
}

SpfTable::SpfTable(std::uint32_t limit) {
    if (limit > 10'000'000) throw ResourceError("SpfTable: limit capped at 10^7");
    if (limit < 2) limit = 2;
    spf_.resize(size_t(limit) + 1);
    for (std::uint32_t i = 0; i <= limit; ++i) spf_[i] = i;
    for (std::uint32_t i = 2; u64(i) * i <= limit; ++i) {
        if (spf_[i] != i) continue;
        for (std::uint32_t j = i * i; j <= limit; j += i) {
            if (spf_[j] == j) spf_[j] = i;
        }
    }
}

bool SpfTable::factor_squarefree(std::uint32_t n, std::vector<std::uint32_t>& primes_out) const {
    primes_out.clear();
    while (n > 1) {
        std::uint32_t p = spf_[n];
        n /= p;
        if (n % p == 0) return false;
        primes_out.push_back(p);
    }
    return true;
}

std::map<ResidueSignature, std::uint64_t> brute_force_counts(const SpfTable& spf, u64 x, int k,
                                                             u64 q) {
    if (x > spf.limit()) throw ResourceError("brute_force_counts: x beyond SPF table");
    if (q < 3) throw ConfigError("brute_force_counts: q must be >= 3");
    if (k < 1) throw ConfigError("brute_force_counts: k must be >= 1");
    std::vector<int> class_index(size_t(q), -1);
    std::vector<u64> classes;
    for (u64 r = 1; r < q; ++r) {
        if (gcd_u64(r, q) == 1) {
            class_index[size_t(r)] = int(classes.size());
            classes.push_back(r);
        }
    }
    std::map<std::vector<std::uint8_t>, u64> tally; // sorted class list -> count
    std::vector<std::uint32_t> primes;
    std::vector<std::uint8_t> key;
    for (u64 n = 2; n <= x; ++n) {
        if (!spf.factor_squarefree(std::uint32_t(n), primes)) continue;
        if (int(primes.size()) != k) continue;
        key.clear();
        bool ok = true;
        for (std::uint32_t p : primes) {
            int c = (q % p == 0) ? -1 : class_index[size_t(p % q)];
            if (c < 0) {
                ok = false;
                break;
            }
            key.push_back(std::uint8_t(c));
        }
        if (!ok) continue;
        std::sort(key.begin(), key.end());
        ++tally[key];
    }
    std::map<ResidueSignature, u64> out;
    for (auto& [cls_list, cnt] : tally) {
        ResidueSignature sig;
        sig.q = q;
        for (std::size_t i = 0; i < cls_list.size();) {
            std::size_t j = i;
            while (j < cls_list.size() && cls_list[j] == cls_list[i]) ++j;
            sig.parts.emplace_back(classes[cls_list[i]], std::uint32_t(j - i));
            i = j;
        }
        out[sig] += cnt;
    }
    return out;
}

std::map<ResidueSignature, std::uint64_t> brute_force_counts(u64 x, int k, u64 q) {
    if (x > 10'000'000) throw ResourceError("brute_force_counts: x capped at 10^7");
    SpfTable spf(static_cast<std::uint32_t>(x));
    return brute_force_counts(spf, x, k, q);
}

} // namespace apbias
