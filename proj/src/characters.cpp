#include "apbias/characters.hpp"
#include "apbias/errors.hpp"
#include "apbias/primality.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace apbias {

namespace {

using u64 = std::uint64_t;
using i64 = std::int64_t;

u64 powmod_u64(u64 a, u64 e, u64 m) {
    u64 r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = (unsigned __int128)(r)*a % m;
        a = (unsigned __int128)(a)*a % m;
        e >>= 1;
    }
    return r;
}

std::vector<u64> prime_factors(u64 n) {
    std::vector<u64> out;
    for (u64 p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            out.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

bool has_order(u64 g, u64 target, u64 m, const std::vector<u64>& target_factors) {
    if (powmod_u64(g, target, m) != 1) return false;
    for (u64 ell : target_factors) {
        if (powmod_u64(g, target / ell, m) == 1) return false;
    }
    return true;
}

u64 smallest_primitive_root(u64 pe, u64 phi_pe) {
    auto factors = prime_factors(phi_pe);
    for (u64 g = 2; g < pe; ++g) {
        if (gcd_u64(g, pe) != 1) continue;
        if (has_order(g, phi_pe, pe, factors)) return g;
    }
    throw NumericalError("no primitive root found mod " + std::to_string(pe));
}

// CRT lift: x = a mod m1, x = 1 mod m2 (m1, m2 coprime).
u64 crt_lift(u64 a, u64 m1, u64 m2) {
    if (m2 == 1) return a % m1;
    u64 q = m1 * m2;
    for (u64 x = a; x < q; x += m1) {
        if (x % m2 == 1) return x;
    }
    throw NumericalError("crt lift failed");
}

UnitGroupStructure build_group(u64 q) {
    UnitGroupStructure g;
    g.q = q;
    u64 n = q;
    for (u64 p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            u64 pe = 1;
            while (n % p == 0) {
                n /= p;
                pe *= p;
            }
            g.prime_powers.emplace_back(p, pe);
        }
    }
    if (n > 1) g.prime_powers.emplace_back(n, n);
    std::sort(g.prime_powers.begin(), g.prime_powers.end());

    for (auto [p, pe] : g.prime_powers) {
        u64 rest = q / pe;
        if (p == 2) {
            if (pe == 2) continue; // (Z/2)* trivial
            if (pe == 4) {
                g.generators.push_back(crt_lift(3, 4, rest));
                g.orders.push_back(2);
            } else {
                // 2^e, e >= 3: components <-1> x <5>
                g.generators.push_back(crt_lift(pe - 1, pe, rest));
                g.orders.push_back(2);
                g.generators.push_back(crt_lift(5, pe, rest));
                g.orders.push_back(pe / 4);
            }
        } else {
            u64 phi_pe = pe / p * (p - 1);
            u64 root = smallest_primitive_root(pe, phi_pe);
            g.generators.push_back(crt_lift(root, pe, rest));
            g.orders.push_back(phi_pe);
        }
    }

    g.phi = 1;
    for (u64 d : g.orders) g.phi *= d;
    g.exponent = 1;
    for (u64 d : g.orders) g.exponent = std::lcm(g.exponent, d);

    g.residue_index.assign(size_t(q), -1);
    for (u64 r = 1; r < q; ++r) {
        if (gcd_u64(r, q) == 1) {
            g.residue_index[size_t(r)] = int(g.residues.size());
            g.residues.push_back(r);
        }
    }
    if (g.residues.size() != g.phi)
        throw NumericalError("unit group order mismatch for q=" + std::to_string(q));

    // Discrete-log table: odometer over the product group, value updated
    // incrementally (a wrap multiplies by g_i once more, closing the cycle).
    g.dlog.assign(g.phi, {});
    const std::size_t m = g.orders.size();
    std::vector<std::uint32_t> exps(m, 0);
    u64 value = 1 % q;
    u64 filled = 0;
    while (true) {
        int idx = g.residue_index[size_t(value)];
        if (idx < 0 || !g.dlog[size_t(idx)].empty())
            throw NumericalError("generator powers do not enumerate the unit group, q=" +
                                 std::to_string(q));
        g.dlog[size_t(idx)] = exps;
        ++filled;
        std::size_t i = 0;
        for (; i < m; ++i) {
            value = (unsigned __int128)(value)*g.generators[i] % q;
            if (exps[i] + 1 < g.orders[i]) {
                ++exps[i];
                break;
            }
            exps[i] = 0;
        }
        if (i == m) break;
    }
    if (filled != g.phi) throw NumericalError("dlog enumeration incomplete");
    return g;
}

} // namespace

std::complex<double> Turn::to_complex() const {
    double angle = 2.0 * std::numbers::pi * double(num) / double(den);
    return {std::cos(angle), std::sin(angle)};
}

std::string Turn::str() const { return std::to_string(num) + "/" + std::to_string(den); }

u64 DirichletCharacter::turn_numerator(std::size_t ri) const {
    const auto& exps = group_->dlog[ri];
    const u64 D = group_->exponent;
    u64 num = 0;
    for (std::size_t i = 0; i < mult_.size(); ++i) {
        num = (num + mult_[i] * exps[i]) % D;
    }
    return num;
}

std::complex<double> DirichletCharacter::operator()(u64 n) const {
    n %= q_;
    int idx = group_->residue_index[size_t(n)];
    if (idx < 0) return {0.0, 0.0};
    return (*roots_)[size_t(turn_numerator(size_t(idx)))];
}

std::complex<double> DirichletCharacter::value_at_class(std::size_t ri) const {
    return (*roots_)[size_t(turn_numerator(ri))];
}

bool DirichletCharacter::turn_at(u64 n, Turn& t) const {
    n %= q_;
    int idx = group_->residue_index[size_t(n)];
    if (idx < 0) return false;
    i64 num = i64(turn_numerator(size_t(idx)));
    i64 den = i64(group_->exponent);
    i64 g = std::gcd(num, den);
    if (g == 0) g = 1;
    t = Turn{num / g, den / g};
    return true;
}

CharacterTable::CharacterTable(u64 q) {
    if (q < 3) throw ConfigError("CharacterTable: q must be >= 3, got " + std::to_string(q));
    if (q > 100000) throw ConfigError("CharacterTable: q must be <= 10^5");
    group_ = build_group(q);
    const std::size_t m = group_.orders.size();
    const u64 phi = group_.phi;
    const u64 D = group_.exponent;

    roots_.resize(size_t(D));
    for (u64 j = 0; j < D; ++j) {
        // snap quarter turns so real characters take exactly {+1, -1}
        if (4 * j % D == 0) {
            u64 quarter = 4 * j / D;
            constexpr std::complex<double> axis[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
            roots_[size_t(j)] = axis[quarter];
            continue;
        }
        double angle = 2.0 * std::numbers::pi * double(j) / double(D);
        roots_[size_t(j)] = {std::cos(angle), std::sin(angle)};
    }

    chars_.reserve(phi);
    std::vector<std::uint32_t> vec(m, 0);
    while (true) {
        DirichletCharacter chi;
        chi.group_ = &group_;
        chi.roots_ = &roots_;
        chi.q_ = q;
        chi.index_ = vec;
        chi.mult_.resize(m);
        u64 order = 1;
        bool principal = true;
        for (std::size_t i = 0; i < m; ++i) {
            if (vec[i] != 0) principal = false;
            u64 d = group_.orders[i];
            order = std::lcm(order, d / gcd_u64(vec[i], d));
            chi.mult_[i] = u64(vec[i]) % D * (D / d) % D;
        }
        chi.order_ = order;
        chi.principal_ = principal;
        chars_.push_back(std::move(chi));
        if (chars_.size() > phi) throw NumericalError("character enumeration overflow");

        // next index vector in lexicographic order (component 0 most significant)
        std::size_t i = m;
        bool advanced = false;
        while (i > 0) {
            --i;
            if (vec[i] + 1 < group_.orders[i]) {
                ++vec[i];
                std::fill(vec.begin() + std::ptrdiff_t(i) + 1, vec.end(), 0u);
                advanced = true;
                break;
            }
        }
        if (!advanced) break;
    }
    if (chars_.size() != phi)
        throw NumericalError("expected phi(q) characters, got " + std::to_string(chars_.size()));
}

std::size_t CharacterTable::conjugate_index(std::size_t i) const {
    const auto& vec = chars_[i].index_vector();
    u64 pos = 0;
    for (std::size_t c = 0; c < vec.size(); ++c) {
        u64 d = group_.orders[c];
        u64 neg = vec[c] == 0 ? 0 : d - vec[c];
        pos = pos * d + neg;
    }
    return size_t(pos);
}

double CharacterTable::orthogonality_defect() const {
    const std::size_t phi = size_t(group_.phi);
    const double phid = double(group_.phi);
    // Materialize value rows once; the loops below are O(phi^3).
    std::vector<std::vector<std::complex<double>>> rows(chars_.size());
    for (std::size_t i = 0; i < chars_.size(); ++i) {
        rows[i].resize(phi);
        for (std::size_t ri = 0; ri < phi; ++ri) rows[i][ri] = chars_[i].value_at_class(ri);
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < chars_.size(); ++i) {
        for (std::size_t j = 0; j < chars_.size(); ++j) {
            std::complex<double> s{0.0, 0.0};
            for (std::size_t ri = 0; ri < phi; ++ri) s += rows[i][ri] * std::conj(rows[j][ri]);
            double target = (i == j) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(s / phid - target));
        }
    }
    for (std::size_t ai = 0; ai < phi; ++ai) {
        for (std::size_t bi = 0; bi < phi; ++bi) {
            std::complex<double> s{0.0, 0.0};
            for (std::size_t i = 0; i < chars_.size(); ++i) s += rows[i][ai] * std::conj(rows[i][bi]);
            double target = (ai == bi) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(s / phid - target));
        }
    }
    return worst;
}

std::string CharacterTable::to_json() const {
    if (group_.q > 10000)
        throw ConfigError("CharacterTable::to_json: export guarded to q <= 10^4");
    std::string out = "{\"q\":" + std::to_string(group_.q) +
                      ",\"phi\":" + std::to_string(group_.phi) + ",\"characters\":[";
    for (std::size_t i = 0; i < chars_.size(); ++i) {
        const auto& chi = chars_[i];
        if (i) out += ",";
        out += "{\"index\":[";
        for (std::size_t c = 0; c < chi.index_vector().size(); ++c) {
            if (c) out += ",";
            out += std::to_string(chi.index_vector()[c]);
        }
        out += "],\"order\":" + std::to_string(chi.order()) + ",\"values\":[";
        for (std::size_t ri = 0; ri < size_t(group_.phi); ++ri) {
            if (ri) out += ",";
            Turn t;
            chi.turn_at(group_.residues[ri], t);
            out += "{\"n\":" + std::to_string(group_.residues[ri]) + ",\"turn\":\"" + t.str() +
                   "\"}";
        }
        out += "]}";
    }
    out += "]}";
    return out;
}

} // namespace apbias
