"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports cleanly and ``DECS_DISABLE_NUMBA``
is unset (or ``0``). Both variants are importable by name so tests and the
benchmark can compare them directly; the unsuffixed names dispatch to the
selected backend.
"""

from __future__ import annotations

import os

import numpy as np


def _numba_requested() -> bool:
    return os.environ.get("DECS_DISABLE_NUMBA", "0").strip().lower() in ("", "0", "false", "no")


try:  # pragma: no cover - exercised implicitly by whichever branch applies
    if not _numba_requested():
        raise ImportError("numba disabled by DECS_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    njit = None
    HAVE_NUMBA = False


# ---------------------------------------------------------------- numpy path


def midranks_numpy(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing the mean of their positions."""
    values = np.asarray(values, dtype=np.float64)
    _, inverse, counts = np.unique(values, return_inverse=True, return_counts=True)
    ends = np.cumsum(counts)
    starts = ends - counts + 1
    return ((starts + ends) / 2.0)[inverse]


def tie_sizes_numpy(values: np.ndarray) -> np.ndarray:
    _, counts = np.unique(np.asarray(values, dtype=np.float64), return_counts=True)
    return counts.astype(np.int64)


def subset_sum_counts_numpy(weights: np.ndarray, k: int) -> np.ndarray:
    """Number of ``k``-subsets of ``weights`` (non-negative ints) per total.

    Returns an int64 array ``c`` with ``c[s]`` = count of size-``k`` subsets
    whose weights sum to ``s``.
    """
    weights = np.asarray(weights, dtype=np.int64)
    total = int(weights.sum())
    dp = np.zeros((k + 1, total + 1), dtype=np.int64)
    dp[0, 0] = 1
    for i, w in enumerate(weights):
        for j in range(min(i + 1, k), 0, -1):
            if w == 0:
                dp[j] += dp[j - 1]
            else:
                dp[j, w:] += dp[j - 1, :-w]
    return dp[k]


def bin_counts_numpy(values: np.ndarray, lo: float, hi: float, bins: int) -> tuple[np.ndarray, int, int]:
    """Uniform-bin histogram over ``[lo, hi]``; the top edge lands in the last bin."""
    values = np.asarray(values, dtype=np.float64)
    width = (hi - lo) / bins
    below = values < lo
    above = values > hi
    inside = values[~(below | above)]
    idx = np.floor((inside - lo) / width).astype(np.int64)
    np.clip(idx, 0, bins - 1, out=idx)
    counts = np.bincount(idx, minlength=bins).astype(np.int64)
    return counts, int(below.sum()), int(above.sum())


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @njit(cache=True)
    def _midranks_sorted(order, sorted_vals):
        n = sorted_vals.shape[0]
        ranks = np.empty(n, dtype=np.float64)
        i = 0
        while i < n:
            j = i
            while j + 1 < n and sorted_vals[j + 1] == sorted_vals[i]:
                j += 1
            r = (i + j + 2) / 2.0
            for m in range(i, j + 1):
                ranks[order[m]] = r
            i = j + 1
        return ranks

    def midranks_numba(values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=np.float64)
        order = np.argsort(values)
        return _midranks_sorted(order, values[order])

    @njit(cache=True)
    def _tie_sizes_sorted(sorted_vals):
        n = sorted_vals.shape[0]
        out = np.empty(n, dtype=np.int64)
        m = 0
        i = 0
        while i < n:
            j = i
            while j + 1 < n and sorted_vals[j + 1] == sorted_vals[i]:
                j += 1
            out[m] = j - i + 1
            m += 1
            i = j + 1
        return out[:m]

    def tie_sizes_numba(values: np.ndarray) -> np.ndarray:
        return _tie_sizes_sorted(np.sort(np.asarray(values, dtype=np.float64)))

    @njit(cache=True)
    def _subset_sum_counts(weights, k):
        total = 0
        for w in weights:
            total += w
        dp = np.zeros((k + 1, total + 1), dtype=np.int64)
        dp[0, 0] = 1
        for i in range(weights.shape[0]):
            w = weights[i]
            top = i + 1 if i + 1 < k else k
            for j in range(top, 0, -1):
                for s in range(total, w - 1, -1):
                    dp[j, s] += dp[j - 1, s - w]
        return dp[k].copy()

    def subset_sum_counts_numba(weights: np.ndarray, k: int) -> np.ndarray:
        return _subset_sum_counts(np.asarray(weights, dtype=np.int64), k)

    @njit(cache=True)
    def _bin_counts(values, lo, hi, bins):
        width = (hi - lo) / bins
        counts = np.zeros(bins, dtype=np.int64)
        below = 0
        above = 0
        for v in values:
            if v < lo:
                below += 1
            elif v > hi:
                above += 1
            else:
                b = int(np.floor((v - lo) / width))
                if b >= bins:
                    b = bins - 1
                elif b < 0:
                    b = 0
                counts[b] += 1
        return counts, below, above

    def bin_counts_numba(values: np.ndarray, lo: float, hi: float, bins: int) -> tuple[np.ndarray, int, int]:
        counts, below, above = _bin_counts(np.asarray(values, dtype=np.float64), float(lo), float(hi), int(bins))
        return counts, int(below), int(above)

    BACKEND = "numba"
    midranks = midranks_numba
    tie_sizes = tie_sizes_numba
    subset_sum_counts = subset_sum_counts_numba
    bin_counts = bin_counts_numba
else:
    midranks_numba = tie_sizes_numba = subset_sum_counts_numba = bin_counts_numba = None
    BACKEND = "numpy"
    midranks = midranks_numpy
    tie_sizes = tie_sizes_numpy
    subset_sum_counts = subset_sum_counts_numpy
    bin_counts = bin_counts_numpy


__all__ = [
    "BACKEND",
    "HAVE_NUMBA",
    "bin_counts",
    "bin_counts_numpy",
    "bin_counts_numba",
    "midranks",
    "midranks_numpy",
    "midranks_numba",
    "subset_sum_counts",
    "subset_sum_counts_numpy",
    "subset_sum_counts_numba",
    "tie_sizes",
    "tie_sizes_numpy",
    "tie_sizes_numba",
]
