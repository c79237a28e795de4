#pragma once
#include <cstdint>

namespace apbias {

// Deterministic Miller-Rabin, exact for all n < 2^64 (fixed 12-witness set).
bool is_prime_u64(std::uint64_t n);

// Smallest prime p with p ≡ a (mod q), gcd(a, q) = 1. Linear scan with
// primality tests; throws ConfigError on gcd(a, q) != 1 and NumericalError
// if the scan passes 10^7 * q (never reached for valid input).
std::uint64_t least_prime(std::uint64_t q, std::uint64_t a);

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b);

} // namespace apbias
