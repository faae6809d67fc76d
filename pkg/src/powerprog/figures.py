"""Matplotlib rendering for the report path: figures are written next to the
delimited output, never shown interactively."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_DPI = 150


def error_scatter(u: np.ndarray, pair_err: np.ndarray, value_err: np.ndarray,
                  title: str, path: str) -> None:
    """Signed count-minus-prediction errors against the shift."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ax.scatter(u, pair_err, s=6, alpha=0.6, label="pair weight")
    ax.scatter(u, value_err, s=6, alpha=0.6, label="value weight")
    ax.axhline(0.0, color="k", lw=0.8)
    ax.set_xlabel("shift u")
    ax.set_ylabel("count $-$ prediction")
    ax.set_title(title)
    ax.legend(frameon=False)
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)


def error_histogram(pair_err: np.ndarray, value_err: np.ndarray,
                    title: str, path: str) -> None:
    """Distribution of |error| for both weightings."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    bins = 40
    ax.hist(np.abs(pair_err), bins=bins, alpha=0.6, label="pair weight")
    ax.hist(np.abs(value_err), bins=bins, alpha=0.6, label="value weight")
    ax.set_xlabel("|count $-$ prediction|")
    ax.set_ylabel("shifts")
    ax.set_title(title)
    ax.legend(frameon=False)
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)


def series_curve(u: np.ndarray, pair: np.ndarray, value: np.ndarray,
                 cutoff: float, path: str) -> None:
    """Both truncated constants across the shift sweep."""
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    ax.plot(u, pair, lw=0.8, label="pair constant")
    ax.plot(u, value, lw=0.8, label="value constant")
    ax.set_xlabel("shift u")
    ax.set_ylabel("truncated constant")
    ax.set_title(f"singular-series truncations (primes $\\leq$ {cutoff:g})")
    ax.legend(frameon=False)
    fig.savefig(path, dpi=_DPI, bbox_inches="tight")
    plt.close(fig)
