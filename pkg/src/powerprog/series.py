"""Singular-series evaluations for x^ell + u, in four truncated forms.

Two Dirichlet-type sums over square-free moduli q <= z,

    sum_q mu(q) * unit_root_excess(q, u) / phi(q)      (pair constant)
    sum_q mu(q) * root_excess(q, u) / phi(q)           (value constant)

and two Euler products over primes p <= P,

    pair:  prod_{p | u} p/(p-1) * prod_{p∤u} ((p-1)(p-rho) - rho) / (p-1)^2
    value: prod_p (p - rho)/(p - 1)

plus the correction factor linking them. The literal pair factor for p | u
is (p-rho)/(p-1-rho) * (1 - rho/(p-1)^2), which divides by zero at p = 2;
it is pre-simplified symbolically to p/(p-1) (rho = 1 when p | u), which
is what the code evaluates. Truncation cutoffs are always carried in the
result; there is no "exact limit" mode because the products converge far
too slowly to certify digits.

Every evaluation exists in a pointwise form (one spec) and a sweep form
(one degree, a whole array of shifts); the sweeps vectorize the per-prime
factors over the shift array and are checked against the pointwise route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import arith, local
from .errors import RangeGuardError
from .local import PolynomialSpec

DIRICHLET_SUM = "DIRICHLET_SUM"
EULER_PRODUCT = "EULER_PRODUCT"
COMBINED_FACTOR_PRODUCT = "COMBINED_FACTOR_PRODUCT"

# Beyond this many factors, products accumulate as sums of logs.
_LOG_SPACE_FACTOR_COUNT = 10**6


@dataclass(frozen=True)
class TruncatedValue:
    """A truncated series/product value with its provenance and cutoff."""

    value: float
    method: str
    cutoff: float
    spec: PolynomialSpec


def _product(factors: list[float]) -> float:
    if len(factors) <= _LOG_SPACE_FACTOR_COUNT:
        result = 1.0
        for f in factors:
            result *= f
        return result
    if any(f == 0.0 for f in factors):
        return 0.0
    return math.exp(math.fsum(math.log(f) for f in factors))


def sigma_prime_sum_trunc(spec: PolynomialSpec, z: float) -> TruncatedValue:
    """Dirichlet-sum truncation of the value constant: q <= z, mu(q) != 0."""
    if z < 1:
        raise ValueError("cutoff z must be >= 1")
    terms = []
    for q, mu, primes in arith.squarefree_factored(int(z)):
        lam = 1
        for p in primes:
            lam *= local.root_count(p, spec) - 1
        terms.append(mu * lam / arith.euler_phi(q))
    return TruncatedValue(math.fsum(terms), DIRICHLET_SUM, z, spec)


def sigma_sum_trunc(spec: PolynomialSpec, z: float) -> TruncatedValue:
    """Dirichlet-sum truncation of the pair constant: q <= z, mu(q) != 0."""
    if z < 1:
        raise ValueError("cutoff z must be >= 1")
    terms = []
    for q, mu, _ in arith.squarefree_factored(int(z)):
        a = local.unit_root_excess(q, spec)
        terms.append(mu * float(a) / arith.euler_phi(q))
    return TruncatedValue(math.fsum(terms), DIRICHLET_SUM, z, spec)


def _pair_factor(p: int, rho: int, divides_u: bool) -> float:
    if divides_u:
        return p / (p - 1)
    return ((p - 1) * (p - rho) - rho) / (p - 1) ** 2


def sigma_product_trunc(spec: PolynomialSpec, P: float) -> TruncatedValue:
    """Euler-product truncation of the pair constant over primes p <= P.

    Zero factors are legal (local obstruction) and make the product 0.
    """
    if P < 2:
        raise ValueError("cutoff P must be >= 2")
    factors = []
    for p in arith.primes_array(int(P)).tolist():
        rho = local.root_count(p, spec)
        factors.append(_pair_factor(p, rho, spec.u % p == 0))
    return TruncatedValue(_product(factors), COMBINED_FACTOR_PRODUCT, P, spec)


def sigma_prime_product_trunc(spec: PolynomialSpec, P: float) -> TruncatedValue:
    """Euler-product truncation of the value constant over primes p <= P."""
    if P < 2:
        raise ValueError("cutoff P must be >= 2")
    factors = []
    for p in arith.primes_array(int(P)).tolist():
        rho = local.root_count(p, spec)
        factors.append((p - rho) / (p - 1))
    return TruncatedValue(_product(factors), EULER_PRODUCT, P, spec)


def pair_correction(spec: PolynomialSpec, P: float) -> float:
    """Truncated factor turning the value product into the pair product.

    Per prime: p/(p-1) when p | u (symbolically simplified; the literal
    (1 - 1/(p-rho))^-1 form divides by zero at p = 2), otherwise
    1 - rho/((p-1)(p-rho)). The denominator p - rho never vanishes since
    rho <= gcd(ell, p-1) < p for p coprime to u, and rho = 1 for p | u;
    the check is kept defensively.
    """
    if P < 2:
        raise ValueError("cutoff P must be >= 2")
    factors = []
    for p in arith.primes_array(int(P)).tolist():
        rho = local.root_count(p, spec)
        if p - rho == 0:
            raise ArithmeticError(f"singular correction factor at p = {p}")
        if spec.u % p == 0:
            factors.append(p / (p - 1))
        else:
            factors.append(((p - 1) * (p - rho) - rho) / ((p - 1) * (p - rho)))
    return _product(factors)


def sigma_full(spec: PolynomialSpec, P_cutoff: float) -> TruncatedValue:
    """Working approximation to the full pair constant (product at P_cutoff)."""
    return sigma_product_trunc(spec, P_cutoff)


def sigma_prime_full(spec: PolynomialSpec, P_cutoff: float) -> TruncatedValue:
    """Working approximation to the full value constant (product at P_cutoff)."""
    return sigma_prime_product_trunc(spec, P_cutoff)


def root_deficit_sum(spec: PolynomialSpec, P: float) -> float:
    """sum over primes p <= P of (root_count(p) - 1)/p, a slow-growth diagnostic."""
    if P < 1:
        return 0.0
    return math.fsum(
        (local.root_count(p, spec) - 1) / p
        for p in arith.primes_array(int(P)).tolist()
    )


# ---------------------------------------------------------------------------
# Sweep forms: one degree, an array of shifts.
# ---------------------------------------------------------------------------

# Use a full residue table when p is small relative to the sweep; direct
# vectorized modpow otherwise.
_TABLE_OVER_POW = 8


def _rho_values(p: int, ell: int, u: np.ndarray,
                cache: dict[int, np.ndarray] | None = None) -> np.ndarray:
    """root_count(p, (ell, u)) for every entry of the shift array u."""
    if cache is not None and p in cache:
        return cache[p]
    if p <= _TABLE_OVER_POW * len(u):
        rho = local.root_count_table(p, ell)[u % p]
    else:
        c = (p - u % p) % p
        g = math.gcd(ell, p - 1)
        t = local._pow_mod_vec(c, (p - 1) // g, p)
        rho = np.where(c == 0, 1, np.where(t == 1, g, 0)).astype(np.int64)
    if cache is not None:
        cache[p] = rho
    return rho


def sigma_product_sweep(ell: int, u_values: np.ndarray, P: float) -> np.ndarray:
    """sigma_product_trunc for each shift in u_values (vectorized)."""
    u = np.asarray(u_values, dtype=np.int64)
    acc = np.ones(len(u))
    for p in arith.primes_array(int(P)).tolist():
        rho = _rho_values(p, ell, u)
        factor = ((p - 1) * (p - rho) - rho) / (p - 1) ** 2
        acc *= np.where(u % p == 0, p / (p - 1), factor)
    return acc


def sigma_prime_product_sweep(ell: int, u_values: np.ndarray, P: float) -> np.ndarray:
    """sigma_prime_product_trunc for each shift in u_values (vectorized)."""
    u = np.asarray(u_values, dtype=np.int64)
    acc = np.ones(len(u))
    for p in arith.primes_array(int(P)).tolist():
        rho = _rho_values(p, ell, u)
        acc *= (p - rho) / (p - 1)
    return acc


def _kahan_add(acc: np.ndarray, comp: np.ndarray, term: np.ndarray) -> None:
    y = term - comp
    t = acc + y
    comp[:] = (t - acc) - y
    acc[:] = t


def sigma_prime_sum_sweep(ell: int, u_values: np.ndarray, z: float) -> np.ndarray:
    """sigma_prime_sum_trunc for each shift in u_values (vectorized, Kahan)."""
    u = np.asarray(u_values, dtype=np.int64)
    acc = np.zeros(len(u))
    comp = np.zeros(len(u))
    cache: dict[int, np.ndarray] = {}
    for q, mu, primes in arith.squarefree_factored(int(z)):
        lam = np.ones(len(u))
        for p in primes:
            lam = lam * (_rho_values(p, ell, u, cache) - 1)
        _kahan_add(acc, comp, mu / arith.euler_phi(q) * lam)
    return acc


def sigma_sum_sweep(ell: int, u_values: np.ndarray, z: float) -> np.ndarray:
    """sigma_sum_trunc for each shift in u_values (vectorized, Kahan)."""
    u = np.asarray(u_values, dtype=np.int64)
    acc = np.zeros(len(u))
    comp = np.zeros(len(u))
    rho_cache: dict[int, np.ndarray] = {}
    for q, mu, primes in arith.squarefree_factored(int(z)):
        a = np.ones(len(u))
        for p in primes:
            rho = _rho_values(p, ell, u, rho_cache)
            # unit excess at p: -1 when p | u, else (p(rho-1) + 1)/(p-1)
            a_p = np.where(u % p == 0, -1.0, (p * (rho - 1) + 1) / (p - 1))
            a = a * a_p
        _kahan_add(acc, comp, mu / arith.euler_phi(q) * a)
    return acc


@dataclass(frozen=True)
class SeriesSweep:
    """Shift sweep of both constants at one product cutoff, with the maxima."""

    ell: int
    cutoff: float
    rows: list[tuple[int, float, float]]
    max_pair: float
    max_value: float


def series_sweep(ell: int, u_max: int, P_cutoff: float) -> SeriesSweep:
    """Both truncated constants for u = 1..u_max, plus the observed maxima."""
    if u_max < 1:
        raise ValueError("u_max must be >= 1")
    u = np.arange(1, u_max + 1, dtype=np.int64)
    pair = sigma_product_sweep(ell, u, P_cutoff)
    value = sigma_prime_product_sweep(ell, u, P_cutoff)
    rows = [(int(n), float(s), float(sp)) for n, s, sp in zip(u, pair, value)]
    return SeriesSweep(
        ell=ell,
        cutoff=P_cutoff,
        rows=rows,
        max_pair=float(np.max(np.abs(pair))),
        max_value=float(np.max(np.abs(value))),
    )
