#include "apbias/primality.hpp"
#include "apbias/errors.hpp"

#include <string>

namespace apbias {

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) {
    while (b) {
        std::uint64_t t = a % b;
        a = b;
        b = t;
    }
    return a;
}

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(u128(a) * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
    u64 r = 1;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

// Witness set covering all n < 2^64.
constexpr u64 kWitnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

} // namespace

bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 p : {u64(2), u64(3), u64(5), u64(7), u64(11), u64(13), u64(17), u64(19), u64(23), u64(29), u64(31), u64(37)}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : kWitnesses) {
        u64 x = powmod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

u64 least_prime(u64 q, u64 a) {
    if (q < 1) throw ConfigError("least_prime: modulus must be positive");
    a %= q;
    if (gcd_u64(a, q) != 1)
        throw ConfigError("least_prime: gcd(a, q) must be 1, got a=" + std::to_string(a) +
                          " q=" + std::to_string(q));
    u64 n = (a == 0) ? q : a; // a == 0 only when q == 1
    const u64 bound = q * u64(10'000'000);
    for (; n <= bound; n += q) {
        if (n >= 2 && is_prime_u64(n)) return n;
    }
    throw NumericalError("least_prime: scan bound exceeded for a=" + std::to_string(a) +
                         " q=" + std::to_string(q));
}

} // namespace apbias
