// Dirichlet character group mod q, built from the unit-group decomposition
// (Z/q)* = prod of cyclic components. Character values are exact roots of
// unity: each value is a fraction of a full turn computed by integer
// arithmetic on discrete logs, with complex doubles read from a shared
// e(j/D) table (D = group exponent). Products of characters and of arguments
// are exact integer arithmetic on turns.

#pragma once
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace apbias {

struct Turn {
    std::int64_t num = 0; // reduced fraction of a full turn, 0 <= num < den
    std::int64_t den = 1;

    bool operator==(const Turn&) const = default;
    std::complex<double> to_complex() const;
    std::string str() const; // "num/den"
};

struct UnitGroupStructure {
    std::uint64_t q = 0;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> prime_powers; // (p, p^e) factors of q
    std::vector<std::uint64_t> generators;      // one per cyclic component, lifted mod q
    std::vector<std::uint64_t> orders;          // component orders d_i, prod = phi(q)
    std::vector<std::uint64_t> residues;        // reduced residues, ascending
    std::vector<int> residue_index;             // size q: residue -> index into residues, or -1
    std::vector<std::vector<std::uint32_t>> dlog; // per reduced residue: exponent vector
    std::uint64_t phi = 0;
    std::uint64_t exponent = 1;                 // lcm of component orders
};

class CharacterTable;

class DirichletCharacter {
public:
    std::uint64_t modulus() const { return q_; }
    const std::vector<std::uint32_t>& index_vector() const { return index_; }
    std::uint64_t order() const { return order_; }
    bool is_principal() const { return principal_; }
    bool is_real() const { return order_ <= 2; }

    // chi(n): exact root of unity on reduced residues, 0 otherwise.
    std::complex<double> operator()(std::uint64_t n) const;
    // Value by precomputed reduced-residue index (group().residues order).
    std::complex<double> value_at_class(std::size_t residue_index) const;
    // Exact angle; returns false (and leaves t untouched) when chi(n) = 0.
    bool turn_at(std::uint64_t n, Turn& t) const;

private:
    friend class CharacterTable;
    std::uint64_t turn_numerator(std::size_t residue_index) const; // over den = group exponent
    const UnitGroupStructure* group_ = nullptr;
    const std::vector<std::complex<double>>* roots_ = nullptr; // e(j/D), D = group exponent
    std::uint64_t q_ = 0;
    std::vector<std::uint32_t> index_;
    std::vector<std::uint64_t> mult_; // per component: t_i * (D / d_i) mod D
    std::uint64_t order_ = 1;
    bool principal_ = true;
};

class CharacterTable {
public:
    // 3 <= q <= 10^5. Characters come out in lexicographic index-vector
    // order, so chi_0 is always at position 0.
    explicit CharacterTable(std::uint64_t q);

    CharacterTable(const CharacterTable&) = delete;
    CharacterTable& operator=(const CharacterTable&) = delete;
    CharacterTable(CharacterTable&&) = delete;
    CharacterTable& operator=(CharacterTable&&) = delete;

    std::uint64_t modulus() const { return group_.q; }
    std::uint64_t phi() const { return group_.phi; }
    const UnitGroupStructure& group() const { return group_; }

    std::size_t size() const { return chars_.size(); }
    const DirichletCharacter& at(std::size_t i) const { return chars_[i]; }
    std::size_t principal_index() const { return 0; }
    // Position of the conjugate character.
    std::size_t conjugate_index(std::size_t i) const;

    // Largest orthogonality defect over both the character-pair and the
    // residue-pair relations. O(phi^3); intended for q up to a few hundred.
    double orthogonality_defect() const;

    // {"q":..., "phi":..., "characters":[{"index":[...],"order":...,
    //  "values":[{"n":...,"turn":"num/den"},...]},...]}. Guarded to q <= 10^4.
    std::string to_json() const;

private:
    UnitGroupStructure group_;
    std::vector<std::complex<double>> roots_;
    std::vector<DirichletCharacter> chars_;
};

} // namespace apbias
