"""Desk-scale experiments on primes in power progressions m^ell + u."""

from .local import PolynomialSpec
from .series import TruncatedValue
from .counts import ErrorRecord
from .variance import VarianceReport
from .expsum import ArcPartition

__version__ = "0.1.0"

__all__ = [
    "PolynomialSpec",
    "TruncatedValue",
    "ErrorRecord",
    "VarianceReport",
    "ArcPartition",
    "__version__",
]
