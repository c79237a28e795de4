// Exact counts of integers <= x that are products of k distinct primes with
// prescribed residue classes mod q. Enumeration runs a DFS over increasing
// prime tuples p_1 < ... < p_k (sets, so each integer is counted once); the
// innermost level is answered by checkpointed pi-difference queries. An
// independent smallest-prime-factor oracle covers x <= 10^7.

#pragma once
#include "apbias/sieve.hpp"
#include "apbias/signature.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace apbias {

struct CountStats {
    std::uint64_t nodes = 0; // DFS prefixes expanded (leaf queries included)
};

// Sieve limit needed to answer every innermost query for (x, k, q):
// max(sqrt(x), x / (product of the k-1 smallest primes coprime to q)).
std::uint64_t required_sieve_limit(std::uint64_t x, int k, std::uint64_t q);

// Throws ResourceError (with the required limit) when the sieve backing a
// count of (x, k, q) would not fit the bitset budget.
void ensure_count_budget(std::uint64_t x, int k, std::uint64_t q,
                         std::uint64_t memory_budget_bytes);

// S_k(x): squarefree products of k distinct primes, all coprime to q.
// Requires sieve attached to q with limit >= required_sieve_limit.
std::uint64_t count_S_k(const SieveTable& sieve, std::uint64_t x, int k, std::uint64_t q,
                        CountStats* stats = nullptr, int workers = 1);

// M_k(x; sig): products whose prime-factor residue multiset equals sig.
std::uint64_t count_M_k(const SieveTable& sieve, std::uint64_t x, const ResidueSignature& sig,
                        CountStats* stats = nullptr, int workers = 1);

// One DFS pass classifying every product by its residue multiset. Values sum
// to count_S_k exactly. Guarded to at most 10^6 distinct signatures.
std::map<ResidueSignature, std::uint64_t> count_all_signatures(const SieveTable& sieve,
                                                               std::uint64_t x, int k,
                                                               std::uint64_t q,
                                                               CountStats* stats = nullptr,
                                                               int workers = 1);

// Smallest-prime-factor table for the brute-force oracle (x <= 10^7).
class SpfTable {
public:
    explicit SpfTable(std::uint32_t limit);
    std::uint32_t limit() const { return std::uint32_t(spf_.size() - 1); }
    // Returns the distinct prime factors of n in ascending order, or an empty
    // view if n is not squarefree (via the out flag).
    bool factor_squarefree(std::uint32_t n, std::vector<std::uint32_t>& primes_out) const;

private:
    std::vector<std::uint32_t> spf_;
};

// Factor every n <= x, keep squarefree n with exactly k distinct prime
// factors all coprime to q, classify by residue multiset.
std::map<ResidueSignature, std::uint64_t> brute_force_counts(std::uint64_t x, int k,
                                                             std::uint64_t q);
std::map<ResidueSignature, std::uint64_t> brute_force_counts(const SpfTable& spf,
                                                             std::uint64_t x, int k,
                                                             std::uint64_t q);

} // namespace apbias
