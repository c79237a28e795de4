"""Bias constants, exact k-almost-prime counts and Euler-product limits for
prime factors in arithmetic progressions."""

from ._apbias import (  # noqa: F401
    ConfigError,
    ConstantsLab,
    NumericalError,
    ResourceError,
    Sieve,
    brute_force_counts,
    count_M_k,
    count_S_k,
    count_all_signatures,
    digamma_rational,
    euler_gamma,
    gamma_complex,
    is_prime,
    least_prime,
    mertens_B,
    prime_zeta,
    riemann_zeta,
    selftest,
)

__all__ = [
    "ConfigError",
    "ConstantsLab",
    "NumericalError",
    "ResourceError",
    "Sieve",
    "brute_force_counts",
    "count_M_k",
    "count_S_k",
    "count_all_signatures",
    "digamma_rational",
    "euler_gamma",
    "gamma_complex",
    "is_prime",
    "least_prime",
    "mertens_B",
    "prime_zeta",
    "riemann_zeta",
    "selftest",
]
