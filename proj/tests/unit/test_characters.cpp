#include <doctest.h>

#include "apbias/characters.hpp"
#include "apbias/errors.hpp"
#include "apbias/primality.hpp"

#include <algorithm>
#include <complex>
#include <set>

using namespace apbias;

namespace {

// Euler criterion oracle for the quadratic character mod an odd prime.
int legendre(std::uint64_t a, std::uint64_t p) {
    std::uint64_t r = 1, base = a % p, e = (p - 1) / 2;
    while (e) {
        if (e & 1) r = r * base % p;
        base = base * base % p;
        e >>= 1;
    }
    return r == 1 ? 1 : (r == 0 ? 0 : -1);
}

} // namespace

TEST_CASE("q = 4: two characters") {
    CharacterTable table(4);
    CHECK(table.phi() == 2);
    CHECK(table.size() == 2);
    CHECK(table.at(0).is_principal());
    CHECK(table.at(1)(3) == std::complex<double>{-1.0, 0.0});
    CHECK(table.at(1)(1) == std::complex<double>{1.0, 0.0});
    CHECK(table.at(0)(3) == std::complex<double>{1.0, 0.0});
    // chi(n) = 0 iff gcd(n, q) > 1
    CHECK(table.at(1)(2) == std::complex<double>{0.0, 0.0});
    CHECK(table.at(1)(4) == std::complex<double>{0.0, 0.0});
}

TEST_CASE("q = 7: six characters, quadratic one matches the Legendre symbol") {
    CharacterTable table(7);
    CHECK(table.phi() == 6);
    CHECK(table.at(0)(10) == std::complex<double>{1.0, 0.0}); // chi0 at gcd(10,7)=1
    for (std::size_t i = 0; i < table.size(); ++i) {
        CHECK(table.at(i)(7) == std::complex<double>{0.0, 0.0}); // n = q
    }
    const DirichletCharacter* quadratic = nullptr;
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (table.at(i).order() == 2) {
            CHECK(quadratic == nullptr);
            quadratic = &table.at(i);
        }
    }
    REQUIRE(quadratic != nullptr);
    for (std::uint64_t a = 1; a < 7; ++a) {
        CHECK((*quadratic)(a).real() == doctest::Approx(double(legendre(a, 7))));
        CHECK((*quadratic)(a).imag() == 0.0);
    }
}

TEST_CASE("q = 13: cyclic of order 12 with generator 2") {
    CharacterTable table(13);
    CHECK(table.phi() == 12);
    REQUIRE(table.group().orders.size() == 1);
    CHECK(table.group().orders[0] == 12);
    CHECK(table.group().generators[0] == 2);
    // direct powering oracle: 2 has order 12 mod 13
    std::uint64_t v = 1;
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 12; ++i) {
        v = v * 2 % 13;
        seen.insert(v);
    }
    CHECK(seen.size() == 12);
}

TEST_CASE("index vectors enumerate the full product group") {
    for (std::uint64_t q : {8ull, 12ull, 16ull, 24ull, 360ull}) {
        CharacterTable table(q);
        std::set<std::vector<std::uint32_t>> vecs;
        for (std::size_t i = 0; i < table.size(); ++i) vecs.insert(table.at(i).index_vector());
        CHECK(vecs.size() == table.phi());
        // lexicographic ordering check
        for (std::size_t i = 1; i < table.size(); ++i) {
            CHECK(table.at(i - 1).index_vector() < table.at(i).index_vector());
        }
    }
}

TEST_CASE("multiplicativity is exact in turn arithmetic") {
    for (std::uint64_t q : {7ull, 12ull, 13ull, 36ull, 360ull}) {
        CharacterTable table(q);
        const auto& residues = table.group().residues;
        for (std::size_t i = 0; i < table.size(); ++i) {
            const auto& chi = table.at(i);
            for (std::size_t mi = 0; mi < residues.size(); mi += 3) {
                for (std::size_t ni = 0; ni < residues.size(); ni += 5) {
                    std::uint64_t m = residues[mi], n = residues[ni];
                    Turn tm, tn, tmn;
                    REQUIRE(chi.turn_at(m, tm));
                    REQUIRE(chi.turn_at(n, tn));
                    REQUIRE(chi.turn_at(m * n % q, tmn));
                    std::int64_t den = tm.den * tn.den;
                    std::int64_t num = (tm.num * tn.den + tn.num * tm.den) % den;
                    CHECK(num * tmn.den == tmn.num * den);
                }
            }
        }
    }
}

TEST_CASE("character values are exact roots of unity") {
    CharacterTable table(13);
    for (std::size_t i = 0; i < table.size(); ++i) {
        const auto& chi = table.at(i);
        for (std::uint64_t a = 1; a < 13; ++a) {
            std::complex<double> v = chi(a);
            CHECK(std::abs(std::abs(v) - 1.0) < 1e-15);
            std::complex<double> pw{1.0, 0.0};
            for (std::uint64_t e = 0; e < chi.order(); ++e) pw *= v;
            CHECK(std::abs(pw - std::complex<double>{1.0, 0.0}) < 1e-13);
        }
        CHECK(chi(1) == std::complex<double>{1.0, 0.0});
    }
}

TEST_CASE("orthogonality defect") {
    CHECK(CharacterTable(4).orthogonality_defect() < 1e-14);
    CHECK(CharacterTable(13).orthogonality_defect() < 1e-12);
    CHECK(CharacterTable(360).orthogonality_defect() < 1e-11);
}

TEST_CASE("character sum projects onto a residue class") {
    for (std::uint64_t q : {7ull, 12ull}) {
        CharacterTable table(q);
        double phi = double(table.phi());
        for (std::uint64_t a = 1; a < q; ++a) {
            if (gcd_u64(a, q) != 1) continue;
            for (std::uint64_t p = 1; p < q; ++p) {
                if (gcd_u64(p, q) != 1) continue;
                std::complex<double> s{0.0, 0.0};
                for (std::size_t i = 0; i < table.size(); ++i)
                    s += std::conj(table.at(i)(a)) * table.at(i)(p);
                double want = (p == a) ? phi : 0.0;
                CHECK(std::abs(s - std::complex<double>{want, 0.0}) < 1e-12);
            }
        }
    }
}

TEST_CASE("conjugate pairing is an involution fixing real characters") {
    for (std::uint64_t q : {7ull, 12ull, 13ull, 40ull}) {
        CharacterTable table(q);
        for (std::size_t i = 0; i < table.size(); ++i) {
            std::size_t j = table.conjugate_index(i);
            CHECK(table.conjugate_index(j) == i);
            if (table.at(i).is_real()) CHECK(j == i);
            for (std::uint64_t n = 1; n < q; ++n) {
                CHECK(std::abs(table.at(j)(n) - std::conj(table.at(i)(n))) < 1e-15);
            }
        }
    }
}

TEST_CASE("construction scales to the upper modulus bound") {
    CharacterTable table(99991); // prime, phi = 99990 = 2 * 3^2 * 5 * 11 * 101
    CHECK(table.phi() == 99990);
    const auto& chi = table.at(12345);
    Turn ta, tb, tab;
    REQUIRE(chi.turn_at(12346, ta));
    REQUIRE(chi.turn_at(54321, tb));
    REQUIRE(chi.turn_at(std::uint64_t(12346) * 54321 % 99991, tab));
    std::int64_t den = ta.den * tb.den;
    std::int64_t num = (ta.num * tb.den + tb.num * ta.den) % den;
    CHECK(num * tab.den == tab.num * den);
    CHECK_THROWS_AS(CharacterTable(100001), ConfigError);
}

TEST_CASE("table guards and JSON export") {
    CHECK_THROWS_AS(CharacterTable(2), ConfigError);
    CHECK_THROWS_AS(CharacterTable(1), ConfigError);
    CharacterTable table(4);
    std::string json = table.to_json();
    CHECK(json.find("\"q\":4") != std::string::npos);
    CHECK(json.find("\"phi\":2") != std::string::npos);
    CHECK(json.find("\"turn\":\"1/2\"") != std::string::npos); // chi(3) = -1
}
