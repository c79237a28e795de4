#include "apbias/sieve.hpp"
#include "apbias/errors.hpp"
#include "apbias/kahan.hpp"
#include "apbias/parallel.hpp"
#include "apbias/primality.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace apbias {

namespace {

using u64 = std::uint64_t;

constexpr u64 kBlockNumbers = u64(1) << 16; // checkpoint granularity
constexpr u64 kMaxLimit = u64(1) << 40;

u64 num_bits(u64 limit) { return limit < 3 ? 0 : (limit - 3) / 2 + 1; }

std::vector<u64> base_primes(u64 up_to) {
    std::vector<char> mark(size_t(up_to) + 1, 1);
    std::vector<u64> primes;
    for (u64 i = 2; i <= up_to; ++i) {
        if (!mark[size_t(i)]) continue;
        primes.push_back(i);
        for (u64 j = i * i; j <= up_to; j += i) mark[size_t(j)] = 0;
    }
    return primes;
}

u64 isqrt_u64(u64 n) {
    u64 r = u64(std::sqrt(double(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

} // namespace

std::uint64_t crc64(const void* data, std::size_t len, std::uint64_t seed) {
    // CRC-64/XZ: reflected polynomial 0xC96C5795D7870F42.
    static const std::array<u64, 256> table = [] {
        std::array<u64, 256> t{};
        for (u64 i = 0; i < 256; ++i) {
            u64 c = i;
            for (int k = 0; k < 8; ++k) c = (c >> 1) ^ ((c & 1) ? 0xC96C5795D7870F42ull : 0);
            t[size_t(i)] = c;
        }
        return t;
    }();
    u64 crc = ~seed;
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ p[i]) & 0xFF] ^ (crc >> 8);
    return ~crc;
}

SieveTable SieveTable::build(u64 limit, u64 attach_modulus, const SieveOptions& opts) {
    if (limit < 3 || limit > kMaxLimit)
        throw ConfigError("build_sieve: limit must be in [3, 2^40], got " + std::to_string(limit));
    if (attach_modulus != 0 && attach_modulus < 3)
        throw ConfigError("build_sieve: attached modulus must be >= 3");
    u64 seg = opts.segment_numbers;
    if (seg < (u64(1) << 14) || seg > (u64(1) << 22) || (seg & (seg - 1)) != 0)
        throw ConfigError("build_sieve: segment size must be a power of two in [2^14, 2^22]");

    u64 nbits = num_bits(limit);
    u64 nwords = (nbits + 63) / 64;
    if (nwords * 8 > opts.memory_budget_bytes)
        throw ResourceError("build_sieve: bitset for limit " + std::to_string(limit) + " needs " +
                            std::to_string(nwords * 8) + " bytes, over the " +
                            std::to_string(opts.memory_budget_bytes) + "-byte budget");

    std::string cache_dir = opts.cache_dir;
    if (cache_dir.empty()) {
        if (const char* env = std::getenv("BIAS_LAB_CACHE_DIR")) cache_dir = env;
    }
    if (!cache_dir.empty()) {
        if (auto cached = try_load_cache(cache_dir, limit, attach_modulus)) {
            return std::move(*cached);
        }
    }

    SieveTable t;
    t.limit_ = limit;
    t.modulus_ = attach_modulus;
    t.words_.assign(size_t(nwords), ~u64(0));

    const auto primes = base_primes(isqrt_u64(limit));
    const u64 words_per_seg = seg / 128; // seg numbers -> seg/2 bits -> seg/128 words
    const u64 nsegs = (nwords + words_per_seg - 1) / words_per_seg;

    parallel_chunks(nsegs, opts.workers, [&](int, u64 seg_begin, u64 seg_end) {
        for (u64 s = seg_begin; s < seg_end; ++s) {
            u64 word_lo = s * words_per_seg;
            u64 word_hi = std::min(nwords, word_lo + words_per_seg);
            u64 idx_lo = word_lo * 64;
            u64 idx_hi = word_hi * 64; // exclusive
            u64 n_lo = 2 * idx_lo + 3;
            u64 n_hi = 2 * (idx_hi - 1) + 3;
            for (u64 p : primes) {
                if (p == 2) continue;
                if (p * p > n_hi) break;
                u64 start = p * p;
                if (start < n_lo) {
                    u64 k = (n_lo + p - 1) / p;
                    if (k % 2 == 0) ++k; // odd multiples only
                    start = k * p;
                    if (start < p * p) start = p * p;
                }
                for (u64 m = start; m <= n_hi; m += 2 * p) {
                    u64 idx = (m - 3) / 2;
                    t.words_[idx >> 6] &= ~(u64(1) << (idx & 63));
                }
            }
        }
    });

    // 1 is not prime (index of 1 does not exist; 3 is index 0, nothing to clear).
    // Clear bits beyond the last valid index so popcount scans stay exact.
    if (nbits % 64 != 0) t.words_.back() &= ~u64(0) >> (64 - (nbits % 64));

    t.build_checkpoints(opts.workers);
    if (!cache_dir.empty()) t.save_cache(cache_dir);
    return t;
}

void SieveTable::build_checkpoints(int workers) {
    classes_.clear();
    class_index_.clear();
    if (modulus_ != 0) {
        class_index_.assign(size_t(modulus_), -1);
        for (u64 r = 1; r < modulus_; ++r) {
            if (gcd_u64(r, modulus_) == 1) {
                class_index_[size_t(r)] = int(classes_.size());
                classes_.push_back(r);
            }
        }
    }
    const u64 nblocks = limit_ / kBlockNumbers + 1;
    const std::size_t phi = classes_.size();
    pi_blocks_.assign(size_t(nblocks), 0);
    class_blocks_.assign(size_t(nblocks) * phi, 0);

    // Per-block tallies in parallel, then a sequential prefix pass.
    parallel_chunks(nblocks, workers, [&](int, u64 b_begin, u64 b_end) {
        for (u64 b = b_begin; b < b_end; ++b) {
            u64 lo = b * kBlockNumbers;
            u64 hi = std::min(limit_, lo + kBlockNumbers - 1);
            u64 total = 0;
            u64* cls = class_blocks_.empty() ? nullptr : &class_blocks_[size_t(b) * phi];
            for_each_prime(lo, hi, [&](u64 p) {
                ++total;
                if (cls) {
                    int c = (p % modulus_ == 0) ? -1 : class_index_[size_t(p % modulus_)];
                    if (c >= 0) ++cls[c];
                }
            });
            pi_blocks_[size_t(b)] = total;
        }
    });
    for (u64 b = 1; b < nblocks; ++b) {
        pi_blocks_[size_t(b)] += pi_blocks_[size_t(b - 1)];
        for (std::size_t c = 0; c < phi; ++c)
            class_blocks_[size_t(b) * phi + c] += class_blocks_[size_t(b - 1) * phi + c];
    }
}

u64 SieveTable::prime_count(u64 y) const {
    if (y > limit_)
        throw ConfigError("prime_count: y=" + std::to_string(y) + " beyond sieve limit " +
                          std::to_string(limit_));
    if (y < 2) return 0;
    u64 b = y / kBlockNumbers;
    u64 count = b > 0 ? pi_blocks_[size_t(b - 1)] : 0;
    u64 lo = b * kBlockNumbers;
    if (b == 0 && y >= 2) ++count; // the prime 2
    // popcount over odd indices in [lo, y]
    if (y >= 3) {
        u64 first = lo < 3 ? 0 : (lo - 2) / 2;
        u64 last = (y - 3) / 2;
        if (first <= last) count += scan_count(first, last);
    }
    return count;
}

u64 SieveTable::scan_count(u64 first, u64 last) const {
    u64 w0 = first >> 6, w1 = last >> 6;
    u64 m0 = ~u64(0) << (first & 63);
    u64 m1 = ~u64(0) >> (63 - (last & 63));
    if (w0 == w1) return u64(std::popcount(words_[size_t(w0)] & m0 & m1));
    u64 c = u64(std::popcount(words_[size_t(w0)] & m0));
    for (u64 w = w0 + 1; w < w1; ++w) c += u64(std::popcount(words_[size_t(w)]));
    return c + u64(std::popcount(words_[size_t(w1)] & m1));
}

std::vector<u64> SieveTable::class_counts_upto(u64 y) const {
    if (modulus_ == 0) throw ConfigError("class_counts_upto: no modulus attached");
    if (y > limit_)
        throw ConfigError("class_counts_upto: y beyond sieve limit");
    const std::size_t phi = classes_.size();
    std::vector<u64> counts(phi, 0);
    if (y < 2) return counts;
    u64 b = y / kBlockNumbers;
    if (b > 0) {
        const u64* base = &class_blocks_[size_t(b - 1) * phi];
        for (std::size_t c = 0; c < phi; ++c) counts[c] = base[c];
    }
    u64 lo = b * kBlockNumbers;
    for_each_prime(std::max<u64>(lo, 2), y, [&](u64 p) {
        if (p % modulus_ == 0) return;
        int c = class_index_[size_t(p % modulus_)];
        if (c >= 0) ++counts[size_t(c)];
    });
    return counts;
}

u64 SieveTable::prime_count_in_class(u64 y, u64 q, u64 r) const {
    r %= q;
    if (gcd_u64(r, q) != 1)
        throw ConfigError("prime_count_in_class: gcd(r, q) must be 1, got r=" + std::to_string(r) +
                          " q=" + std::to_string(q));
    if (y > limit_)
        throw ConfigError("prime_count_in_class: y beyond sieve limit");
    if (q == modulus_) {
        u64 count = 0;
        const std::size_t phi = classes_.size();
        u64 b = y / kBlockNumbers;
        if (b > 0) count = class_blocks_[size_t(b - 1) * phi + size_t(class_index_[size_t(r)])];
        u64 lo = b * kBlockNumbers;
        for_each_prime(std::max<u64>(lo, 2), y, [&](u64 p) {
            if (p % q == r) ++count;
        });
        return count;
    }
    // No checkpoints for this modulus: full scan.
    u64 count = 0;
    for_each_prime(2, y, [&](u64 p) {
        if (p % q == r) ++count;
    });
    return count;
}

double SieveTable::reciprocal_sum_in_class(u64 cutoff, u64 q, u64 r) const {
    r %= q;
    if (gcd_u64(r, q) != 1)
        throw ConfigError("reciprocal_sum_in_class: gcd(r, q) must be 1");
    if (cutoff > limit_)
        throw ConfigError("reciprocal_sum_in_class: cutoff beyond sieve limit");
    KahanSum acc;
    for_each_prime(2, cutoff, [&](u64 p) {
        if (p % q == r) acc.add(1.0 / double(p));
    });
    return acc.value();
}

PrimeSums SieveTable::prime_sums(u64 q, u64 cutoff) const {
    if (q < 3) throw ConfigError("prime_sums: q must be >= 3");
    if (cutoff > limit_) throw ConfigError("prime_sums: cutoff beyond sieve limit");
    PrimeSums out;
    out.q = q;
    out.cutoff = cutoff;
    std::vector<int> index(size_t(q), -1);
    for (u64 r = 1; r < q; ++r) {
        if (gcd_u64(r, q) == 1) {
            index[size_t(r)] = int(out.classes.size());
            out.classes.push_back(r);
        }
    }
    std::vector<KahanSum> acc(out.classes.size());
    KahanSum total;
    for_each_prime(2, cutoff, [&](u64 p) {
        int c = (p % q == 0) ? -1 : index[size_t(p % q)];
        if (c >= 0) {
            acc[size_t(c)].add(1.0 / double(p));
            total.add(1.0 / double(p));
        }
    });
    out.per_class.reserve(acc.size());
    for (auto& a : acc) out.per_class.push_back(a.value());
    out.coprime_total = total.value();
    return out;
}

namespace {

std::string cache_path(const std::string& dir, u64 limit, u64 modulus) {
    return dir + "/sieve-" + std::to_string(limit) + "-m" + std::to_string(modulus) + ".apb";
}

constexpr char kMagic[8] = {'A', 'P', 'B', 'S', 'I', 'E', 'V', '1'};

} // namespace

void SieveTable::save_cache(const std::string& dir) const {
    std::string path = cache_path(dir, limit_, modulus_);
    std::FILE* f = std::fopen(path.c_str(), "wb");
    if (!f) return; // cache is best-effort
    u64 crc = crc64(kMagic, sizeof kMagic);
    crc = crc64(&limit_, sizeof limit_, crc);
    crc = crc64(&modulus_, sizeof modulus_, crc);
    crc = crc64(words_.data(), words_.size() * 8, crc);
    bool ok = std::fwrite(kMagic, 1, sizeof kMagic, f) == sizeof kMagic &&
              std::fwrite(&limit_, 8, 1, f) == 1 && std::fwrite(&modulus_, 8, 1, f) == 1 &&
              std::fwrite(words_.data(), 8, words_.size(), f) == words_.size() &&
              std::fwrite(&crc, 8, 1, f) == 1;
    std::fclose(f);
    if (!ok) std::remove(path.c_str());
}

std::optional<SieveTable> SieveTable::try_load_cache(const std::string& dir, u64 limit,
                                                     u64 modulus) {
    std::string path = cache_path(dir, limit, modulus);
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) return std::nullopt;
    char magic[8];
    u64 flimit = 0, fmod = 0;
    SieveTable t;
    bool ok = std::fread(magic, 1, 8, f) == 8 && std::memcmp(magic, kMagic, 8) == 0 &&
              std::fread(&flimit, 8, 1, f) == 1 && std::fread(&fmod, 8, 1, f) == 1 &&
              flimit == limit && fmod == modulus;
    if (ok) {
        u64 nwords = (num_bits(limit) + 63) / 64;
        t.words_.resize(size_t(nwords));
        u64 crc_file = 0;
        ok = std::fread(t.words_.data(), 8, size_t(nwords), f) == size_t(nwords) &&
             std::fread(&crc_file, 8, 1, f) == 1;
        if (ok) {
            u64 crc = crc64(kMagic, sizeof kMagic);
            crc = crc64(&limit, sizeof limit, crc);
            crc = crc64(&modulus, sizeof modulus, crc);
            crc = crc64(t.words_.data(), t.words_.size() * 8, crc);
            ok = crc == crc_file;
        }
    }
    std::fclose(f);
    if (!ok) return std::nullopt;
    t.limit_ = limit;
    t.modulus_ = modulus;
    t.build_checkpoints(1);
    return t;
}

SieveTable build_sieve(u64 limit, u64 attach_modulus, const SieveOptions& opts) {
    return SieveTable::build(limit, attach_modulus, opts);
}

} // namespace apbias
