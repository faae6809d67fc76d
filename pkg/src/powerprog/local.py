"""Local (mod p and mod q) arithmetic of the binomial x^ell + u.

Root counts modulo a prime follow the power-residue closed form

    rho(p) = 1                          if p | u,
    rho(p) = g * [(-u)^((p-1)/g) == 1]  otherwise, with g = gcd(ell, p-1),

checked against direct residue enumeration for small p. On square-free q the
two multiplicative coefficients used by the singular series are

    root_excess(q)      = prod_{p | q} (rho(p) - 1)
    unit_root_excess(q) = (q/phi(q)) * prod_{p|q, p∤u} (rho(p) - 1 + 1/p)
                              * prod_{p | gcd(q,u)} (rho(p) - 2 + 1/p)

the second kept in exact rational arithmetic so the series sums carry no
avoidable rounding. Gauss-type sums over h^ell are evaluated by direct
summation with an exact root-of-unity table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import arith

# Enumeration is the unimpeachable oracle for tiny p; closed form above.
_ENUMERATION_CUTOFF = 64


@dataclass(frozen=True)
class PolynomialSpec:
    """The pair (ell, u) defining x^ell + u."""

    ell: int
    u: int

    def __post_init__(self) -> None:
        if self.ell < 1:
            raise ValueError("degree ell must be >= 1")
        if self.u == 0:
            raise ValueError("shift u must be nonzero")

    def __str__(self) -> str:
        sign = "+" if self.u > 0 else "-"
        return f"x^{self.ell} {sign} {abs(self.u)}"


def _require_prime(p: int) -> None:
    if not arith.is_prime_64(p):
        raise ValueError(f"{p} is not prime")


def root_count(p: int, spec: PolynomialSpec) -> int:
    """Number of roots of x^ell + u modulo the prime p."""
    _require_prime(p)
    c = (-spec.u) % p
    if c == 0:
        return 1
    if p <= _ENUMERATION_CUTOFF:
        return sum(1 for x in range(p) if pow(x, spec.ell, p) == c)
    g = math.gcd(spec.ell, p - 1)
    return g if pow(c, (p - 1) // g, p) == 1 else 0


def _pow_mod_vec(base: np.ndarray, exp: int, mod: int) -> np.ndarray:
    """base**exp % mod elementwise, int64-safe for mod < 2^31.5."""
    result = np.ones_like(base)
    b = base % mod
    e = exp
    while e:
        if e & 1:
            result = result * b % mod
        b = b * b % mod
        e >>= 1
    return result


def root_count_table(p: int, ell: int) -> np.ndarray:
    """root_count(p, (ell, u)) for every residue class u mod p, as one array.

    Entry c is the count for u congruent to c; entry 0 is the p | u branch.
    Vectorized closed form, used by the sweep paths.
    """
    _require_prime(p)
    if p * p >= 2**63:
        raise ValueError("modulus too large for vectorized arithmetic")
    g = math.gcd(ell, p - 1)
    c = (p - np.arange(1, p, dtype=np.int64)) % p  # class of -u for u = 1..p-1
    rho = np.where(_pow_mod_vec(c, (p - 1) // g, p) == 1, g, 0)
    return np.concatenate(([1], rho)).astype(np.int64)


def root_excess(q: int, spec: PolynomialSpec) -> int:
    """prod over primes p | q of (root_count(p) - 1); q must be square-free."""
    if q < 1:
        raise ValueError("q must be >= 1")
    fac = arith.factorize(q)
    if any(e > 1 for _, e in fac.factors):
        raise ValueError(f"q = {q} is not square-free")
    result = 1
    for p, _ in fac.factors:
        result *= root_count(p, spec) - 1
    return result


def unit_root_excess(q: int, spec: PolynomialSpec) -> Fraction:
    """The unit-restricted analogue of root_excess on square-free q, exact.

    Assembled per prime as ((rho-1)p + 1)/p for p coprime to u and
    ((rho-2)p + 1)/p for p | u, times q/phi(q).
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    fac = arith.factorize(q)
    if any(e > 1 for _, e in fac.factors):
        raise ValueError(f"q = {q} is not square-free")
    result = Fraction(1)
    for p, _ in fac.factors:
        rho = root_count(p, spec)
        result *= Fraction(p, p - 1)
        if spec.u % p == 0:
            result *= Fraction((rho - 2) * p + 1, p)
        else:
            result *= Fraction((rho - 1) * p + 1, p)
    return result


def _unit_mask(q: int) -> np.ndarray:
    h = np.arange(q, dtype=np.int64)
    return np.gcd(h, q) == 1 if q > 1 else np.array([True])


def power_gauss_sum(q: int, a: int, ell: int) -> complex:
    """sum over h in (Z/q)^* of e(a h^ell / q), by direct summation."""
    if q < 1:
        raise ValueError("q must be >= 1")
    h = np.arange(q, dtype=np.int64)[_unit_mask(q)]
    idx = a % q * _pow_mod_vec(h, ell, q) % q
    roots = np.exp(2j * np.pi * np.arange(q) / q)
    return complex(roots[idx].sum())


def power_gauss_sum_full(q: int, a: int, ell: int) -> complex:
    """sum over all h in Z/q of e(a h^ell / q)."""
    if q < 1:
        raise ValueError("q must be >= 1")
    h = np.arange(q, dtype=np.int64)
    idx = a % q * _pow_mod_vec(h, ell, q) % q
    roots = np.exp(2j * np.pi * np.arange(q) / q)
    return complex(roots[idx].sum())


def _is_perfect_power(c: int, t: int) -> bool:
    """True when c = w^t for some integer w (c may be negative for odd t)."""
    if c < 0:
        if t % 2 == 0:
            return False
        return (-arith.introot(-c, t)) ** t == c
    return arith.introot(c, t) ** t == c


def is_irreducible(spec: PolynomialSpec) -> bool:
    """Irreducibility of x^ell + u over Q (binomial criterion, exact roots).

    x^ell - c with c = -u is reducible iff c = w^t for some prime t | ell,
    or 4 | ell and c = -4 w^4.
    """
    if spec.ell == 1:
        return True
    c = -spec.u
    for t, _ in arith.factorize(spec.ell).factors:
        if _is_perfect_power(c, t):
            return False
    if spec.ell % 4 == 0 and c < 0 and c % 4 == 0:
        if _is_perfect_power(-c // 4, 4):
            return False
    return True
