"""Weighted prime counts along m^ell + u and their error records.

count_prime_pairs weights by Lambda(m) * Lambda(m^ell + u), so both the base
point and the polynomial value must be prime powers; count_prime_values
weights by Lambda(m^ell + u) alone. Predictions multiply a truncated
singular-series constant by the exact number of admissible m (the integer
root of X), which matches the normalization of the variance statistics.

Prime powers are counted exactly as the Lambda weight demands; there is no
primes-only shortcut.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import arith, series
from .local import PolynomialSpec


@dataclass(frozen=True)
class ErrorRecord:
    """Per-shift comparison of a weighted count against its prediction."""

    spec: PolynomialSpec
    X: int
    count: float
    prediction: float
    error: float


def _m_values(spec: PolynomialSpec, X: int) -> np.ndarray:
    """All m >= 1 with m^ell <= X, after the 64-bit overflow guard."""
    if X < 1:
        raise ValueError("X must be >= 1")
    arith.guard_power_shift(spec.ell, spec.u, X)
    return np.arange(1, arith.introot(X, spec.ell) + 1, dtype=np.int64)


def count_prime_pairs(spec: PolynomialSpec, X: int) -> float:
    """sum over m^ell <= X of Lambda(m) * Lambda(m^ell + u)."""
    m = _m_values(spec, X)
    table = arith.lambda_table(int(m[-1]))
    support = m[table.values[m] != 0]
    if len(support) == 0:
        return 0.0
    outer = arith.von_mangoldt_batch(support**spec.ell + spec.u)
    inner = table.log_array()[support]
    return float(np.dot(inner, outer))


def count_prime_values(spec: PolynomialSpec, X: int) -> float:
    """sum over m^ell <= X of Lambda(m^ell + u)."""
    m = _m_values(spec, X)
    return float(arith.von_mangoldt_batch(m**spec.ell + spec.u).sum())


def pair_error_record(spec: PolynomialSpec, X: int, sigma_cutoff: float) -> ErrorRecord:
    """Error record for the pair count against the pair constant."""
    count = count_prime_pairs(spec, X)
    prediction = series.sigma_full(spec, sigma_cutoff).value * arith.introot(X, spec.ell)
    return ErrorRecord(spec, X, count, prediction, count - prediction)


def value_error_record(spec: PolynomialSpec, X: int, sigma_cutoff: float) -> ErrorRecord:
    """Error record for the value count against the value constant."""
    count = count_prime_values(spec, X)
    prediction = series.sigma_prime_full(spec, sigma_cutoff).value * arith.introot(X, spec.ell)
    return ErrorRecord(spec, X, count, prediction, count - prediction)


def dyadic_blocks(ell: int, X: int, decay_exponent: float) -> list[tuple[float, float]]:
    """Cover of (X * L^-B, X] by half-open blocks (z, 2^ell z], L = log X.

    Blocks descend by the factor 2^ell from (X/2^ell, X]; the last block is
    truncated at the cut X * L^-B. Disjoint, and their union is exactly
    (X * L^-B, X].
    """
    if X < 2**ell:
        raise ValueError(f"X must be >= 2^ell = {2**ell}")
    cut = X * math.log(X) ** (-decay_exponent)
    blocks = []
    hi = float(X)
    while hi > cut:
        lo = hi / 2**ell
        blocks.append((max(lo, cut), hi))
        hi = lo
    return blocks


def block_pair_count(spec: PolynomialSpec, lo: float, hi: float) -> float:
    """Pair count restricted to lo < m^ell <= hi (no value-side constraint)."""
    m_hi = arith.introot(int(hi), spec.ell)
    arith.guard_power_shift(spec.ell, spec.u, int(hi))
    m = np.arange(1, m_hi + 1, dtype=np.int64)
    powers = m**spec.ell
    m = m[powers > lo]
    if len(m) == 0:
        return 0.0
    table = arith.lambda_table(int(m[-1]))
    support = m[table.values[m] != 0]
    if len(support) == 0:
        return 0.0
    outer = arith.von_mangoldt_batch(support**spec.ell + spec.u)
    inner = table.log_array()[support]
    return float(np.dot(inner, outer))


# ---------------------------------------------------------------------------
# Shift sweeps, used by the variance statistics and the CLI.
# ---------------------------------------------------------------------------

def pair_counts_sweep(ell: int, u_values: np.ndarray, X: int) -> np.ndarray:
    """count_prime_pairs for each shift (shared base table, batched weights)."""
    u = np.asarray(u_values, dtype=np.int64)
    arith.guard_power_shift(ell, int(np.abs(u).max()), X)
    root = arith.introot(X, ell)
    table = arith.lambda_table(max(root, 2))
    m = np.arange(1, root + 1, dtype=np.int64)
    support = m[table.values[m] != 0]
    out = np.zeros(len(u))
    if len(support) == 0:
        return out
    inner = table.log_array()[support]
    powers = support**ell
    for i, shift in enumerate(u.tolist()):
        out[i] = np.dot(inner, arith.von_mangoldt_batch(powers + shift))
    return out


def value_counts_sweep(ell: int, u_values: np.ndarray, X: int) -> np.ndarray:
    """count_prime_values for each shift (batched weights)."""
    u = np.asarray(u_values, dtype=np.int64)
    arith.guard_power_shift(ell, int(np.abs(u).max()), X)
    root = arith.introot(X, ell)
    powers = np.arange(1, root + 1, dtype=np.int64) ** ell
    out = np.zeros(len(u))
    for i, shift in enumerate(u.tolist()):
        out[i] = arith.von_mangoldt_batch(powers + shift).sum()
    return out
