"""Exact integer arithmetic substrate: sieves, primality, von Mangoldt weights,
and the standard multiplicative functions.

All tables store exact integers (the von Mangoldt table holds the prime base p,
not log p); logarithms are taken in double precision only when weights are
accumulated. Primality above the sieve range uses a deterministic Miller-Rabin
witness set valid for every 64-bit input.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field

import numpy as np

from .errors import RangeGuardError

# Segment length for sieving beyond the dense-table ceiling.
_SEGMENT_LIMIT = 10**8
_SEGMENT_SIZE = 1 << 22

# Strong-pseudoprime witnesses covering all n < 2^64 (Sinclair's set).
_MR_WITNESSES = (2, 325, 9375, 28178, 450775, 9780504, 1795265022)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
                 53, 59, 61, 67, 71, 73, 79, 83, 89, 97)


def _dense_sieve(limit: int) -> np.ndarray:
    """Boolean primality array of length limit+1."""
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i:: i] = False
    return flags


def sieve_primes(limit: int) -> list[int]:
    """All primes <= limit, ascending. limit < 2 gives an empty list.

    Dense sieve up to _SEGMENT_LIMIT entries; segmented above that to keep
    the working set bounded.
    """
    if limit < 2:
        return []
    if limit <= _SEGMENT_LIMIT:
        return np.nonzero(_dense_sieve(limit))[0].tolist()

    base = np.nonzero(_dense_sieve(math.isqrt(limit)))[0]
    primes = base.tolist()
    lo = int(base[-1]) + 1
    while lo <= limit:
        hi = min(lo + _SEGMENT_SIZE, limit + 1)
        flags = np.ones(hi - lo, dtype=bool)
        for p in base:
            p = int(p)
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start < hi:
                flags[start - lo:: p] = False
        primes.extend((np.nonzero(flags)[0] + lo).tolist())
        lo = hi
    return primes


# Grow-only cache of sieved primes, shared read-only by the sweep code.
_prime_cache: dict[str, np.ndarray] = {}


def primes_array(limit: int) -> np.ndarray:
    """Primes <= limit as an int64 array, served from a grow-only cache."""
    cached = _prime_cache.get("primes")
    if cached is None or _prime_cache["limit"] < limit:
        cached = np.asarray(sieve_primes(max(limit, 1000)), dtype=np.int64)
        _prime_cache["primes"] = cached
        _prime_cache["limit"] = max(limit, 1000)
    cut = bisect_right(cached.tolist(), limit) if limit < _prime_cache["limit"] else len(cached)
    return cached[:cut]


@dataclass
class LambdaTable:
    """Dense von Mangoldt table: values[n] is the prime p with Lambda(n) = log p,
    or 0 when Lambda(n) = 0. Exact integers; logs taken at accumulation time."""

    limit: int
    values: np.ndarray
    _logs: np.ndarray | None = field(default=None, repr=False)

    def base(self, n: int) -> int:
        return int(self.values[n])

    def weight(self, n: int) -> float:
        b = int(self.values[n])
        return math.log(b) if b else 0.0

    def log_array(self) -> np.ndarray:
        """float64 array of Lambda(n) for n = 0..limit (computed once)."""
        if self._logs is None:
            logs = np.zeros(self.limit + 1)
            nz = self.values != 0
            logs[nz] = np.log(self.values[nz].astype(np.float64))
            self._logs = logs
        return self._logs

    def prime_power_support(self) -> np.ndarray:
        """Indices n in [2, limit] with Lambda(n) != 0, ascending."""
        return np.nonzero(self.values)[0]


def build_lambda_table(limit: int) -> LambdaTable:
    """Von Mangoldt table for 1..limit: entry p^k holds p, all else 0."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    dtype = np.int32 if limit < 2**31 else np.int64
    values = np.zeros(limit + 1, dtype=dtype)
    for p in sieve_primes(limit):
        pk = p
        while pk <= limit:
            values[pk] = p
            pk *= p
    return LambdaTable(limit=limit, values=values)


_table_cache: dict[str, LambdaTable] = {}


def lambda_table(limit: int) -> LambdaTable:
    """Grow-only shared LambdaTable covering at least [1, limit]."""
    cached = _table_cache.get("table")
    if cached is None or cached.limit < limit:
        cached = build_lambda_table(limit)
        _table_cache["table"] = cached
    return cached


def is_prime_64(n: int) -> bool:
    """Deterministic primality for 0 <= n < 2^64 (fixed witness set)."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        a %= n
        if a == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def introot(n: int, k: int) -> int:
    """Floor k-th root of n >= 0: rounded float root, then exact +-1 correction."""
    if n < 0:
        raise ValueError("introot needs n >= 0")
    if n == 0:
        return 0
    if k == 1:
        return n
    r = int(round(n ** (1.0 / k)))
    while r > 0 and r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def von_mangoldt_64(n: int) -> tuple[int, float]:
    """(p, log p) when n = p^k for a prime p and k >= 1, else (0, 0.0).

    Small-prime trial factor first; otherwise a primality test on n and
    exact integer k-th roots (with neighborhood verification) for the
    remaining perfect-power cases.
    """
    if n < 2:
        return (0, 0.0)
    for p in _SMALL_PRIMES:
        if n % p == 0:
            m = n
            while m % p == 0:
                m //= p
            return (p, math.log(p)) if m == 1 else (0, 0.0)
    if is_prime_64(n):
        return (n, math.log(n))
    # Perfect power p^k with p > 97 forces k <= log_101(n).
    k = 2
    while 101**k <= n:
        r = introot(n, k)
        if r**k == n and is_prime_64(r):
            return (r, math.log(r))
        k += 1
    return (0, 0.0)


# Precomputed prime powers used by the vectorized compositeness filter.
_SMALL_PRIME_POWERS = {
    p: np.array([p**k for k in range(1, 64) if p**k < 2**63], dtype=np.int64)
    for p in _SMALL_PRIMES
}


def von_mangoldt_batch(values: np.ndarray) -> np.ndarray:
    """Lambda weights for an int64 array, agreeing exactly with von_mangoldt_64.

    Vectorized small-prime filter first (divisibility by p < 100 settles a
    value unless it is a pure power of p); survivors go through the pointwise
    routine.
    """
    values = np.asarray(values, dtype=np.int64)
    out = np.zeros(values.shape, dtype=np.float64)
    undecided = values >= 2
    for p in _SMALL_PRIMES:
        hit = undecided & (values % p == 0)
        if not hit.any():
            continue
        powers = hit & np.isin(values, _SMALL_PRIME_POWERS[p])
        out[powers] = math.log(p)
        undecided &= ~hit
    for idx in np.nonzero(undecided)[0]:
        out[idx] = von_mangoldt_64(int(values[idx]))[1]
    return out


@dataclass(frozen=True)
class FactoredInteger:
    """n >= 1 with its prime factorization, primes ascending."""

    n: int
    factors: tuple[tuple[int, int], ...]


def factorize(q: int) -> FactoredInteger:
    """Trial-division factorization (intended for moduli, q up to ~10^12)."""
    if q < 1:
        raise ValueError("factorize needs q >= 1")
    n = q
    factors = []
    for p in sieve_primes(math.isqrt(q)):
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            factors.append((p, e))
    if n > 1:
        factors.append((n, 1))
    return FactoredInteger(n=q, factors=tuple(factors))


def mobius(q: int) -> int:
    if q < 1:
        raise ValueError("mobius needs q >= 1")
    fac = factorize(q)
    if any(e > 1 for _, e in fac.factors):
        return 0
    return -1 if len(fac.factors) % 2 else 1


def euler_phi(q: int) -> int:
    if q < 1:
        raise ValueError("euler_phi needs q >= 1")
    phi = q
    for p, _ in factorize(q).factors:
        phi -= phi // p
    return phi


def spf_table(limit: int) -> np.ndarray:
    """Smallest-prime-factor table 0..limit (spf[0] = spf[1] = 0)."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, limit + 1):
        if spf[p] == 0:
            spf[p::p] = np.where(spf[p::p] == 0, p, spf[p::p])
    return spf


def squarefree_factored(limit: int) -> list[tuple[int, int, tuple[int, ...]]]:
    """(q, mu(q), prime divisors) for every square-free q in [1, limit]."""
    spf = spf_table(limit)
    rows = [(1, 1, ())]
    for q in range(2, limit + 1):
        n = q
        primes = []
        squarefree = True
        while n > 1:
            p = int(spf[n])
            n //= p
            if n % p == 0:
                squarefree = False
                break
            primes.append(p)
        if squarefree:
            rows.append((q, -1 if len(primes) % 2 else 1, tuple(primes)))
    return rows


def guard_power_shift(ell: int, u: int, X: int) -> None:
    """Reject (ell, u, X) whose values m^ell + u would overflow 64-bit math."""
    top = introot(X, ell) ** ell + abs(u)
    if top >= 2**63:
        raise RangeGuardError(
            f"m^{ell} + {u} reaches {top} for m^{ell} <= {X}: exceeds the 63-bit guard"
        )
