"""Averaged error statistics over the shift u, and the mean-square
truncation experiments for the singular series.

The headline statistic sums, over 1 <= u <= y, the squared difference
between a weighted count at level X and its singular-series prediction;
the reported normalization divides by y * X^(2/ell). Shifts whose
prediction is exactly zero (local obstructions) stay in the sum, as the
unrestricted average demands, but are tallied separately since they
explain heavy tails.

All reductions run in ascending shift order with compensated summation,
so reports are bit-reproducible across runs and worker counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import arith, counts, series
from .errors import RangeGuardError

_QUANTILES = (0.0, 0.25, 0.5, 0.75, 1.0)
_QUANTILE_KEYS = ("min", "q25", "median", "q75", "max")


@dataclass(frozen=True)
class VarianceReport:
    """Aggregated squared-error statistic for one (ell, y, X, cutoff) run."""

    ell: int
    y: int
    X: int
    sigma_cutoff: float
    S: float
    normalized: float
    n_obstructed: int
    per_u_quantiles: dict[str, float] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "ell": self.ell,
            "y": self.y,
            "X": self.X,
            "sigma_cutoff": self.sigma_cutoff,
            "S": self.S,
            "normalized": self.normalized,
            "n_obstructed": self.n_obstructed,
            "per_u_quantiles": dict(self.per_u_quantiles),
        }


def error_block(ell: int, u_lo: int, u_hi: int, X: int, sigma_cutoff: float,
                weighted: bool) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(counts, predictions, errors) for shifts u_lo..u_hi inclusive.

    The worker unit for parallel runs; blocks are combined in ascending
    order so the final report does not depend on the worker count.
    """
    u = np.arange(u_lo, u_hi + 1, dtype=np.int64)
    root = arith.introot(X, ell)
    if weighted:
        cnt = counts.pair_counts_sweep(ell, u, X)
        pred = series.sigma_product_sweep(ell, u, sigma_cutoff) * root
    else:
        cnt = counts.value_counts_sweep(ell, u, X)
        pred = series.sigma_prime_product_sweep(ell, u, sigma_cutoff) * root
    return cnt, pred, cnt - pred


def assemble_report(ell: int, y: int, X: int, sigma_cutoff: float,
                    predictions: np.ndarray, errors: np.ndarray) -> VarianceReport:
    """Reduce per-shift errors (ascending u) into a VarianceReport."""
    S = math.fsum(float(e) * float(e) for e in errors)
    quantiles = np.quantile(np.abs(errors), _QUANTILES) if len(errors) else np.zeros(5)
    return VarianceReport(
        ell=ell,
        y=y,
        X=X,
        sigma_cutoff=sigma_cutoff,
        S=S,
        normalized=S / (y * X ** (2.0 / ell)),
        n_obstructed=int(np.count_nonzero(predictions == 0.0)),
        per_u_quantiles={k: float(v) for k, v in zip(_QUANTILE_KEYS, quantiles)},
    )


def pair_variance(ell: int, y: int, X: int, sigma_cutoff: float) -> VarianceReport:
    """Summed squared error of the pair counts over shifts 1..y."""
    if not 1 <= y <= X:
        raise ValueError("need 1 <= y <= X")
    _, pred, err = error_block(ell, 1, y, X, sigma_cutoff, weighted=True)
    return assemble_report(ell, y, X, sigma_cutoff, pred, err)


def value_variance(ell: int, y: int, X: int, sigma_cutoff: float) -> VarianceReport:
    """Summed squared error of the value counts over shifts 1..y."""
    if not 1 <= y <= X:
        raise ValueError("need 1 <= y <= X")
    _, pred, err = error_block(ell, 1, y, X, sigma_cutoff, weighted=False)
    return assemble_report(ell, y, X, sigma_cutoff, pred, err)


# Reference products at large cutoffs are expensive; memoize them across the
# usual pattern of several truncation levels against one reference.
_REF_CACHE: dict[tuple, np.ndarray] = {}


def _reference_products(ell: int, v: int, y: int, ref_cutoff: float) -> np.ndarray:
    key = (ell, v, y, float(ref_cutoff))
    if key not in _REF_CACHE:
        if len(_REF_CACHE) >= 8:
            _REF_CACHE.pop(next(iter(_REF_CACHE)))
        u = np.arange(y + 1, 2 * y + 1, dtype=np.int64) * v
        _REF_CACHE[key] = series.sigma_prime_product_sweep(ell, u, ref_cutoff)
    return _REF_CACHE[key]


def truncation_mean_square(ell: int, v: int, y: int, z: float, ref_cutoff: float,
                           method: str = series.DIRICHLET_SUM) -> float:
    """(1/y) * sum over y < n <= 2y of |trunc(nv, z) - full(nv, ref_cutoff)|^2.

    The truncated route is the Dirichlet sum at cutoff z by default; passing
    method=EULER_PRODUCT routes it through the product form instead (with
    z = ref_cutoff that reduces to an exact self-difference of 0).
    """
    if v == 0:
        raise ValueError("v must be nonzero")
    if not 1 <= z <= y:
        raise ValueError("need 1 <= z <= y")
    u = np.arange(y + 1, 2 * y + 1, dtype=np.int64) * v
    if method == series.DIRICHLET_SUM:
        trunc = series.sigma_prime_sum_sweep(ell, u, z)
    elif method == series.EULER_PRODUCT:
        trunc = series.sigma_prime_product_sweep(ell, u, z)
    else:
        raise ValueError(f"unknown truncation method {method!r}")
    diff = trunc - _reference_products(ell, v, y, ref_cutoff)
    return math.fsum(float(d) * float(d) for d in diff) / y


def product_sum_discrepancy(ell: int, y: int, x: float) -> tuple[float, float]:
    """Summed squared product-vs-sum gaps at one shared cutoff x.

    Returns (pair discrepancy, value discrepancy): for u <= y, the squared
    difference between the product and Dirichlet-sum truncations, both cut
    at x. The cutoff is capped at 10^4; the compensating tail of moduli up
    to exp(log^2 x) is not simulated.
    """
    if x > 10**4:
        raise RangeGuardError("product_sum_discrepancy cutoff cap is 10^4")
    if y < 1:
        return (0.0, 0.0)
    if x < 2:
        raise ValueError("cutoff x must be >= 2")
    u = np.arange(1, y + 1, dtype=np.int64)
    d_pair = series.sigma_product_sweep(ell, u, x) - series.sigma_sum_sweep(ell, u, x)
    d_value = (series.sigma_prime_product_sweep(ell, u, x)
               - series.sigma_prime_sum_sweep(ell, u, x))
    return (
        math.fsum(float(d) * float(d) for d in d_pair),
        math.fsum(float(d) * float(d) for d in d_value),
    )
