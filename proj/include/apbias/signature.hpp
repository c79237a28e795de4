#pragma once
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace apbias {

// Multiset of residue classes mod q assigned to the prime factors of a
// k-almost-prime: parts are (reduced residue b, multiplicity k_b), b distinct
// and ascending. Grammar: "b1^k1*b2^k2" with "^1" optional, e.g. "3^2" or
// "1*3". Residues are reduced mod q at parse time; duplicates merge.
struct ResidueSignature {
    std::uint64_t q = 0;
    std::vector<std::pair<std::uint64_t, std::uint32_t>> parts;

    std::uint32_t k_total() const {
        std::uint32_t k = 0;
        for (auto& [b, kb] : parts) k += kb;
        return k;
    }
    std::size_t num_classes() const { return parts.size(); }

    std::string str() const; // canonical "b1^k1*b2^k2"
    auto operator<=>(const ResidueSignature&) const = default;
};

// Throws ConfigError on bad grammar or residues with gcd(b, q) > 1. When a
// residue needed reduction mod q and warn is non-null, appends a note.
ResidueSignature parse_signature(const std::string& text, std::uint64_t q,
                                 std::string* warn = nullptr);

// Signature with each of the k slots in class b (the all-same case).
ResidueSignature same_class_signature(std::uint64_t q, std::uint64_t b, std::uint32_t k);

// k! / (k_1! ... k_l!) as a double.
double ordering_multinomial(const ResidueSignature& sig);

} // namespace apbias
