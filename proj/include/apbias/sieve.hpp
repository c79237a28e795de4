// Segmented, odd-only prime sieve with per-block cumulative prime counts and
// optional per-residue-class counts for one attached modulus.
//
// Encoding: bit i <-> odd number 2i + 3; 2 is handled specially. Memory is
// ~limit/16 bytes. Checkpoints are kept at 2^16-number block boundaries, so a
// count query scans at most one block. Segment construction partitions the
// word array into whole-word chunks, so the finished bitset is identical for
// any worker count and any segment size that is a multiple of 128 numbers.

#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace apbias {

// CRC-64/XZ of a byte stream (used by the sieve cache trailer).
std::uint64_t crc64(const void* data, std::size_t len, std::uint64_t seed = 0);

struct SieveOptions {
    std::uint64_t segment_numbers = std::uint64_t(1) << 20; // numbers per construction segment
    int workers = 1;
    std::uint64_t memory_budget_bytes = std::uint64_t(2) << 30; // bitset budget
    std::string cache_dir;                                      // empty: no on-disk cache
};

struct PrimeSums {
    std::uint64_t q = 0;
    std::uint64_t cutoff = 0;
    std::vector<std::uint64_t> classes;    // reduced residues, ascending
    std::vector<double> per_class;         // sum of 1/p over p <= cutoff, p = class
    double coprime_total = 0.0;            // sum of 1/p over p <= cutoff, gcd(p, q) = 1
};

class SieveTable {
public:
    // limit in [3, 2^40]; attach_modulus 0 (none) or >= 3. Uses/creates the
    // on-disk bitset cache when opts.cache_dir (or BIAS_LAB_CACHE_DIR) is set.
    static SieveTable build(std::uint64_t limit, std::uint64_t attach_modulus = 0,
                            const SieveOptions& opts = {});

    std::uint64_t limit() const { return limit_; }
    std::uint64_t attached_modulus() const { return modulus_; }

    bool is_prime(std::uint64_t n) const {
        if (n < 2 || n > limit_) return false;
        if (n == 2) return true;
        if (n % 2 == 0) return false;
        std::uint64_t i = (n - 3) / 2;
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }

    // #{p <= y}, y <= limit.
    std::uint64_t prime_count(std::uint64_t y) const;

    // #{p <= y : p ≡ r (mod q)}, gcd(r, q) = 1. O(block) when q is the
    // attached modulus; full scan otherwise.
    std::uint64_t prime_count_in_class(std::uint64_t y, std::uint64_t q, std::uint64_t r) const;

    // Per-class counts #{p <= y : p ≡ class} for the attached modulus, in
    // class-index order (ascending reduced residues). One block scan.
    std::vector<std::uint64_t> class_counts_upto(std::uint64_t y) const;

    // Reduced residues of the attached modulus, ascending.
    const std::vector<std::uint64_t>& classes() const { return classes_; }
    // residue (mod attached q) -> class index, or -1.
    int class_of(std::uint64_t residue) const { return class_index_[residue]; }

    // Sum of 1/p over p <= cutoff with p ≡ r (mod q), compensated, ascending.
    double reciprocal_sum_in_class(std::uint64_t cutoff, std::uint64_t q, std::uint64_t r) const;

    // All per-class reciprocal sums plus the coprime total, one pass.
    PrimeSums prime_sums(std::uint64_t q, std::uint64_t cutoff) const;

    // Calls fn(p) for every prime lo <= p <= hi in ascending order.
    template <typename Fn>
    void for_each_prime(std::uint64_t lo, std::uint64_t hi, Fn&& fn) const {
        if (hi > limit_) hi = limit_;
        if (lo <= 2 && hi >= 2) fn(std::uint64_t(2));
        if (hi < 3) return;
        std::uint64_t first = lo < 3 ? 0 : (lo - 2) / 2; // index of first odd >= lo
        std::uint64_t last = (hi - 3) / 2;               // index of last odd <= hi
        if (first > last) return;
        std::uint64_t w = first >> 6;
        std::uint64_t word = words_[w] & (~std::uint64_t(0) << (first & 63));
        const std::uint64_t wlast = last >> 6;
        while (true) {
            if (w == wlast) word &= ~std::uint64_t(0) >> (63 - (last & 63));
            while (word) {
                std::uint64_t bit = std::uint64_t(__builtin_ctzll(word));
                word &= word - 1;
                fn(2 * ((w << 6) + bit) + 3);
            }
            if (w == wlast) break;
            word = words_[++w];
        }
    }

    // CRC-64 of the packed bitset (determinism checks).
    std::uint64_t checksum() const { return crc64(words_.data(), words_.size() * 8); }

    // On-disk cache: magic "APBSIEV1", limit, modulus, packed bits, CRC-64.
    void save_cache(const std::string& dir) const;
    static std::optional<SieveTable> try_load_cache(const std::string& dir, std::uint64_t limit,
                                                    std::uint64_t modulus);

private:
    SieveTable() = default;
    void build_checkpoints(int workers);
    std::uint64_t scan_count(std::uint64_t idx_first, std::uint64_t idx_last) const;

    std::uint64_t limit_ = 0;
    std::uint64_t modulus_ = 0;
    std::vector<std::uint64_t> words_;
    std::vector<std::uint64_t> pi_blocks_;      // cumulative pi at end of each 2^16 block
    std::vector<std::uint64_t> class_blocks_;   // cumulative per-class, phi entries per block
    std::vector<std::uint64_t> classes_;        // reduced residues of modulus_
    std::vector<int> class_index_;              // size modulus_, -1 when not reduced
};

// Convenience wrapper matching the construction entry point used by the CLI.
SieveTable build_sieve(std::uint64_t limit, std::uint64_t attach_modulus = 0,
                       const SieveOptions& opts = {});

} // namespace apbias
