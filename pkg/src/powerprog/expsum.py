"""Circle-method layer: exponential sums, the major-arc dissection, and an
exact trigonometric-polynomial check of the counting identity.

Four sums over a dyadic block in m^ell:

    power_phase_sum(alpha, z, ell)            sum e(m^ell a), z < m^ell <= 2^ell z
    power_phase_sum_weighted(alpha, z, ell)   the same with Lambda(m) weights
    linear_phase_sum(alpha, z, ell)           sum e(-m a), m <= 2^ell z
    linear_phase_sum_weighted(alpha, z, ell)  the same with Lambda(m) weights

Naive double products m^ell * alpha lose all phase accuracy once m^ell is
large, so every phase is reduced mod 1 exactly: alpha is treated as the
rational it is (a float IS a dyadic rational), and n*alpha mod 1 is computed
in integer arithmetic before the complex exponential. Long linear sums use
exact anchors every _BLOCK terms with a shared offset table, keeping the
per-term phase error at a few ulp.

Grid sampling at the rationals k/N is evaluated with an FFT, which computes
those exact sample sums (indices are the exact residues, so no phase drift);
the pointwise evaluators above serve as its cross-check.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import arith, local
from .errors import RangeGuardError
from .local import PolynomialSpec

_BLOCK = 4096
_CIRCLE_GUARD = 10**6


def _phase_unit(n: int, alpha) -> complex:
    """e(n * alpha) with the argument reduced mod 1 in exact arithmetic."""
    if isinstance(alpha, int):
        return 1.0 + 0j
    if isinstance(alpha, Fraction):
        num, den = alpha.numerator, alpha.denominator
    else:
        num, den = float(alpha).as_integer_ratio()
    r = n * num % den
    return cmath.exp(2j * math.pi * (r / den))


def _power_range(z: float, ell: int) -> tuple[int, int]:
    """(m_lo, m_hi) with z < m^ell <= 2^ell z exactly at the boundaries."""
    if z < 1:
        raise ValueError("z must be >= 1")
    lo = arith.introot(int(z), ell)
    hi = arith.introot(int(2**ell * z), ell)
    return lo + 1, hi


def power_phase_sum(alpha, z: float, ell: int) -> complex:
    """sum of e(m^ell * alpha) over the dyadic block z < m^ell <= 2^ell z."""
    m_lo, m_hi = _power_range(z, ell)
    total = math.fsum(_phase_unit(m**ell, alpha).real for m in range(m_lo, m_hi + 1))
    imag = math.fsum(_phase_unit(m**ell, alpha).imag for m in range(m_lo, m_hi + 1))
    value = complex(total, imag)
    assert abs(value) <= max(m_hi - m_lo + 1, 1) * (1 + 1e-12)
    return value


def power_phase_sum_weighted(alpha, z: float, ell: int) -> complex:
    """sum of Lambda(m) e(m^ell * alpha) over z < m^ell <= 2^ell z."""
    m_lo, m_hi = _power_range(z, ell)
    table = arith.lambda_table(max(m_hi, 2))
    terms = [
        (table.weight(m), _phase_unit(m**ell, alpha))
        for m in range(m_lo, m_hi + 1)
        if table.values[m]
    ]
    value = complex(
        math.fsum(w * ph.real for w, ph in terms),
        math.fsum(w * ph.imag for w, ph in terms),
    )
    assert abs(value) <= math.fsum(w for w, _ in terms) * (1 + 1e-12) + 1e-12
    return value


def _linear_sum(alpha, M: int, weights: np.ndarray | None) -> complex:
    """sum over 1 <= m <= M of w(m) e(m * alpha), blockwise exact anchors."""
    if M < 1:
        return 0j
    table = np.array([_phase_unit(j, alpha) for j in range(min(_BLOCK, M + 1))])
    re_parts, im_parts = [], []
    for start in range(1, M + 1, _BLOCK):
        stop = min(start + _BLOCK, M + 1)
        block = _phase_unit(start, alpha) * table[: stop - start]
        if weights is not None:
            block = block * weights[start:stop]
        s = block.sum()
        re_parts.append(s.real)
        im_parts.append(s.imag)
    return complex(math.fsum(re_parts), math.fsum(im_parts))


def linear_phase_sum(alpha, z: float, ell: int) -> complex:
    """sum of e(-m * alpha) over 1 <= m <= 2^ell z."""
    M = int(2**ell * z)
    value = _linear_sum(alpha, M, None).conjugate()
    assert abs(value) <= M * (1 + 1e-12)
    return value


def linear_phase_sum_weighted(alpha, z: float, ell: int) -> complex:
    """sum of Lambda(m) e(-m * alpha) over 1 <= m <= 2^ell z."""
    M = int(2**ell * z)
    table = arith.lambda_table(max(M, 2))
    value = _linear_sum(alpha, M, table.log_array()).conjugate()
    assert abs(value) <= float(table.log_array()[1: M + 1].sum()) * (1 + 1e-12) + 1e-12
    return value


# ---------------------------------------------------------------------------
# Exact sampling grids at k/N and the circle-identity integral.
# ---------------------------------------------------------------------------

def linear_weighted_samples(z: float, ell: int, N: int) -> np.ndarray:
    """linear_phase_sum_weighted at alpha = k/N for k = 0..N-1 (FFT form)."""
    M = int(2**ell * z)
    if M >= N:
        raise ValueError("need N > 2^ell z for alias-free samples")
    a = np.zeros(N)
    a[1: M + 1] = arith.lambda_table(max(M, 2)).log_array()[1: M + 1]
    return np.fft.fft(a)


def power_weighted_samples(z: float, ell: int, N: int) -> np.ndarray:
    """power_phase_sum_weighted at alpha = k/N for k = 0..N-1 (FFT form)."""
    m_lo, m_hi = _power_range(z, ell)
    if int(2**ell * z) >= N:
        raise ValueError("need N > 2^ell z for alias-free samples")
    table = arith.lambda_table(max(m_hi, 2))
    b = np.zeros(N)
    for m in range(m_lo, m_hi + 1):
        if table.values[m]:
            b[m**ell] = table.weight(m)
    return np.fft.ifft(b) * N


def power_samples(z: float, ell: int, N: int) -> np.ndarray:
    """power_phase_sum at alpha = k/N for k = 0..N-1 (FFT form)."""
    m_lo, m_hi = _power_range(z, ell)
    if int(2**ell * z) >= N:
        raise ValueError("need N > 2^ell z for alias-free samples")
    b = np.zeros(N)
    for m in range(m_lo, m_hi + 1):
        b[m**ell] = 1.0
    return np.fft.ifft(b) * N


def circle_integral(spec: PolynomialSpec, z: float) -> float:
    """Exact unit-interval integral of the circle-method integrand.

    Samples the two weighted sums at N equally spaced points with N strictly
    larger than the maximal absolute frequency of the integrand, so the
    sample mean of their product times e(u * alpha) IS the integral, as a
    trigonometric-polynomial identity. Equals the direct block convolution
    with the boundary convention m^ell + u <= 2^ell z.
    """
    if spec.u < 1:
        raise ValueError("circle_integral needs u >= 1")
    top = 2**spec.ell * z
    if top > _CIRCLE_GUARD:
        raise RangeGuardError(f"circle_integral block cap is 2^ell z <= {_CIRCLE_GUARD}")
    N = 2 * int(top) + spec.u + 1
    J = linear_weighted_samples(z, spec.ell, N)
    J_ell = power_weighted_samples(z, spec.ell, N)
    k = np.arange(N, dtype=np.int64)
    shift = np.exp(2j * np.pi * (spec.u * k % N) / N)
    value = (J * J_ell * shift).mean()
    assert abs(value.imag) < 1e-8
    return float(value.real)


# ---------------------------------------------------------------------------
# Major/minor arc dissection.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ArcPartition:
    """Major arcs (a/q - delta, a/q + delta] for q <= Q, gcd(a, q) = 1.

    Q = L^E and delta = L^E / X with L = log X; E is passed literally.
    Arcs are kept in ascending center order; all centers lie in (0, 1], so
    the dissection tiles (delta, 1 + delta] and any point is classified
    after reduction into that window.
    """

    X: int
    exponent: float
    Q: float
    delta: float
    arcs: tuple[tuple[int, int], ...]  # (q, a) ascending by a/q

    def centers(self) -> list[Fraction]:
        return [Fraction(a, q) for q, a in self.arcs]

    def intervals(self) -> list[tuple[float, float]]:
        return [(a / q - self.delta, a / q + self.delta) for q, a in self.arcs]

    def major_measure(self) -> float:
        return math.fsum(hi - lo for lo, hi in self.intervals())

    def classify(self, alpha) -> tuple[int, int] | None:
        """(q, a) of the containing major arc, or None when alpha is minor.

        Exact rational comparison when alpha is a Fraction or int; floats
        get a 1e-15 slack on the arc boundary.
        """
        exact = isinstance(alpha, (Fraction, int))
        if exact:
            t = Fraction(alpha) % 1
            if t <= Fraction(self.delta):
                t += 1
            radius = Fraction(self.delta)
        else:
            t = float(alpha) % 1.0
            if t <= self.delta:
                t += 1.0
            radius = self.delta + 1e-15
        for q in range(1, int(self.Q) + 1):
            for a in {round(t * q) + d for d in (-1, 0, 1)}:
                if 1 <= a <= q and math.gcd(a, q) == 1:
                    if exact:
                        if abs(t - Fraction(a, q)) <= radius:
                            return (q, a)
                    elif abs(t - a / q) <= radius:
                        return (q, a)
        return None


def build_major_arcs(X: int, exponent: float) -> ArcPartition:
    """ArcPartition for level X with arc parameter Q = (log X)^exponent.

    Requires X >= 16 and Q^3 <= X, and verifies pairwise disjointness of
    the constructed arcs by exact rational comparison.
    """
    if X < 16:
        raise ValueError("X must be >= 16")
    L = math.log(X)
    Q = L**exponent
    if Q**3 > X:
        raise ValueError(f"arc parameter Q = {Q:.3f} violates Q^3 <= X")
    delta = Q / X
    arcs = sorted(
        ((q, a) for q in range(1, int(Q) + 1)
         for a in range(1, q + 1) if math.gcd(a, q) == 1),
        key=lambda qa: Fraction(qa[1], qa[0]),
    )
    two_delta = 2 * Fraction(delta)
    for (q1, a1), (q2, a2) in zip(arcs, arcs[1:]):
        if Fraction(a2, q2) - Fraction(a1, q1) < two_delta:
            raise ValueError(
                f"major arcs at {a1}/{q1} and {a2}/{q2} overlap (delta = {delta:.3e})"
            )
    return ArcPartition(X=X, exponent=exponent, Q=Q, delta=delta, arcs=tuple(arcs))


# ---------------------------------------------------------------------------
# Major-arc residuals.
# ---------------------------------------------------------------------------

def _exact_alpha(q: int, a: int, beta) -> Fraction:
    if math.gcd(a, q) != 1:
        raise ValueError(f"need gcd(a, q) = 1, got a = {a}, q = {q}")
    return Fraction(a, q) + (beta if isinstance(beta, Fraction) else Fraction(float(beta)))


def major_arc_residuals(q: int, a: int, beta, z: float, ell: int) -> tuple[complex, complex]:
    """Residuals of the two power sums against their major-arc main terms.

    For alpha = a/q + beta, returns

        (J_ell(alpha) - I_ell(beta) B(q,a)/phi(q),
         I_ell(alpha) - I_ell(beta) B'(q,a)/q)

    with B, B' the Gauss-type sums over h^ell mod q.
    """
    alpha = _exact_alpha(q, a, beta)
    i_beta = power_phase_sum(beta if isinstance(beta, Fraction) else Fraction(float(beta)), z, ell)
    r_weighted = (
        power_phase_sum_weighted(alpha, z, ell)
        - i_beta * local.power_gauss_sum(q, a, ell) / arith.euler_phi(q)
    )
    r_plain = (
        power_phase_sum(alpha, z, ell)
        - i_beta * local.power_gauss_sum_full(q, a, ell) / q
    )
    return r_weighted, r_plain


def linear_residual(q: int, a: int, beta, z: float, ell: int) -> complex:
    """J(alpha) - mu(q)/phi(q) * I(beta) for alpha = a/q + beta.

    The linear sums carry the e(-m alpha) phase, so the degree-1 Gauss
    coefficient at -a collapses to mu(q).
    """
    alpha = _exact_alpha(q, a, beta)
    beta_f = beta if isinstance(beta, Fraction) else Fraction(float(beta))
    return (
        linear_phase_sum_weighted(alpha, z, ell)
        - arith.mobius(q) / arith.euler_phi(q) * linear_phase_sum(beta_f, z, ell)
    )
