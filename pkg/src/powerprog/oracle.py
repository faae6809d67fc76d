"""Brute-force reference implementations, deliberately simple and slow.

Everything here is O(range) with no algebraic shortcuts: residue counts by
enumeration, coefficient values by their literal double sums, counts by
direct loops with trial-division weights. Ranges are hard-capped so test
runs terminate; larger inputs are refused.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import RangeGuardError
from .local import PolynomialSpec

_MAX_P = 10**6
_MAX_Q = 10**4
_MAX_BLOCK = 10**7


def is_prime_trial(n: int) -> bool:
    """Trial division up to sqrt(n)."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def lambda_trial(n: int) -> float:
    """Von Mangoldt weight by trial division: log p when n = p^k, else 0."""
    if n < 2:
        return 0.0
    p = 2
    while p * p <= n:
        if n % p == 0:
            m = n
            while m % p == 0:
                m //= p
            return math.log(p) if m == 1 else 0.0
        p += 1
    return math.log(n)  # no divisor <= sqrt(n): n is prime


def root_count_enumerated(p: int, spec: PolynomialSpec) -> int:
    """Count roots of x^ell + u mod p by full residue enumeration."""
    if p > _MAX_P:
        raise RangeGuardError(f"oracle prime cap is {_MAX_P}")
    target = (-spec.u) % p
    count = 0
    for x in range(p):
        y = 1
        for _ in range(spec.ell):
            y = y * x % p
        if y == target:
            count += 1
    return count


def root_count_classes(p: int, ell: int) -> np.ndarray:
    """Root counts for every shift class mod p from one enumeration pass.

    Entry c counts x with x^ell + c == 0 mod p; the sweep variant of
    root_count_enumerated (each x lands in exactly one class).
    """
    if p > _MAX_P:
        raise RangeGuardError(f"oracle prime cap is {_MAX_P}")
    x = np.arange(p, dtype=np.int64)
    y = np.ones(p, dtype=np.int64)
    for _ in range(ell):
        y = y * x % p
    return np.bincount((-y) % p, minlength=p)


def root_excess_double_sum(q: int, spec: PolynomialSpec) -> complex:
    """(1/q) sum over a in (Z/q)^*, h in Z/q of e(a(h^ell + u)/q), literally."""
    if q > _MAX_Q:
        raise RangeGuardError(f"oracle modulus cap is {_MAX_Q}")
    total = 0j
    for a in range(1, q + 1):
        if math.gcd(a, q) != 1:
            continue
        for h in range(q):
            phase = a * (pow(h, spec.ell, q) + spec.u) % q
            total += cmath.exp(2j * cmath.pi * phase / q)
    return total / q


def unit_root_excess_double_sum(q: int, spec: PolynomialSpec) -> complex:
    """(1/phi(q)) sum over a, h both in (Z/q)^* of e(a(h^ell + u)/q), literally."""
    if q > _MAX_Q:
        raise RangeGuardError(f"oracle modulus cap is {_MAX_Q}")
    total = 0j
    phi = 0
    for a in range(1, q + 1):
        if math.gcd(a, q) != 1:
            continue
        phi += 1
        for h in range(1, q + 1):
            if math.gcd(h, q) != 1:
                continue
            phase = a * (pow(h, spec.ell, q) + spec.u) % q
            total += cmath.exp(2j * cmath.pi * phase / q)
    return total / phi


def double_sum_grid(q: int, ell: int, u_values: list[int],
                     units_only: bool) -> list[complex]:
    """The same literal double sums for many shifts, evaluated on one grid."""
    if q > _MAX_Q:
        raise RangeGuardError(f"oracle modulus cap is {_MAX_Q}")
    a = np.arange(1, q + 1, dtype=np.int64)
    a = a[np.gcd(a, q) == 1]
    h = np.arange(q, dtype=np.int64)
    if units_only:
        h = h[np.gcd(h, q) == 1] if q > 1 else h
    hp = np.ones_like(h)
    for _ in range(ell):
        hp = hp * h % q
    roots = np.exp(2j * np.pi * np.arange(q) / q)
    base = a[:, None] * hp[None, :] % q  # phase grid without the shift term
    norm = q if not units_only else len(a)
    out = []
    for u in u_values:
        idx = (base + a[:, None] * (u % q)) % q
        out.append(complex(roots[idx].sum()) / norm)
    return out


def dyadic_pair_count(spec: PolynomialSpec, z: float) -> float:
    """Direct convolution over the block z < m^ell <= 2^ell z.

    Adds Lambda(m) * Lambda(m^ell + u) whenever m^ell + u <= 2^ell z, the
    same boundary convention the circle-identity check uses. Trial-division
    weights throughout.
    """
    top = 2**spec.ell * z
    if top > _MAX_BLOCK:
        raise RangeGuardError(f"oracle block cap is {_MAX_BLOCK}")
    total = 0.0
    m = 1
    while m**spec.ell <= top:
        v = m**spec.ell
        if v > z and v + spec.u <= top:
            total += lambda_trial(m) * lambda_trial(v + spec.u)
        m += 1
    return total


def weighted_count_direct(spec: PolynomialSpec, X: int) -> float:
    """Direct loop for sum over m^ell <= X of Lambda(m) * Lambda(m^ell + u)."""
    if X > _MAX_BLOCK:
        raise RangeGuardError(f"oracle count cap is {_MAX_BLOCK}")
    total = 0.0
    m = 1
    while m**spec.ell <= X:
        w = lambda_trial(m)
        if w:
            total += w * lambda_trial(m**spec.ell + spec.u)
        m += 1
    return total


def value_count_direct(spec: PolynomialSpec, X: int) -> float:
    """Direct loop for sum over m^ell <= X of Lambda(m^ell + u)."""
    if X > _MAX_BLOCK:
        raise RangeGuardError(f"oracle count cap is {_MAX_BLOCK}")
    total = 0.0
    m = 1
    while m**spec.ell <= X:
        total += lambda_trial(m**spec.ell + spec.u)
        m += 1
    return total
