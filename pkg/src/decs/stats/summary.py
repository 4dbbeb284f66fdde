"""Percentiles, outlier exclusion and per-bucket win/uplift summaries."""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from ..errors import EmptyResultError
from ..metrics import Winner, assign_bucket, bucket_labels

PERCENTILES = (5, 10, 25, 50, 75, 90, 95)
TOTAL_LABEL = "Grand totals"
DEFAULT_MIN_N = 5


class EmptySample(EmptyResultError):
    reason = "EmptySample"


def percentile(values: Sequence[float] | np.ndarray, q: float) -> float:
    """Linear interpolation between closest ranks on the sorted sample."""
    v = np.sort(np.asarray(values, dtype=np.float64))
    n = len(v)
    if n == 0:
        raise EmptySample("percentile of an empty sample")
    if not 0 <= q <= 100:
        raise ValueError("q must be within [0, 100]")
    h = (n - 1) * q / 100.0
    lo = math.floor(h)
    if lo + 1 >= n:
        return float(v[-1])
    return float(v[lo] + (h - lo) * (v[lo + 1] - v[lo]))


def clip_outliers(values: Sequence[float] | np.ndarray, bound_pct: float = 5.0) -> np.ndarray:
    """Drop (not winsorize) values whose magnitude exceeds ``bound_pct``."""
    if not bound_pct > 0:
        raise ValueError("bound_pct must be positive")
    v = np.asarray(values, dtype=np.float64)
    return v[np.abs(v) <= bound_pct]


@dataclass(frozen=True)
class BucketStats:
    bucket: str
    n: int
    p05: float | None = None
    p10: float | None = None
    p25: float | None = None
    p50: float | None = None
    p75: float | None = None
    p90: float | None = None
    p95: float | None = None
    mean: float | None = None
    wr_out: float | None = None
    parity: float | None = None
    lr_out: float | None = None

    @property
    def available(self) -> bool:
        return self.mean is not None


def _stats_for(bucket: str, recs: list, min_n: int) -> BucketStats:
    n = len(recs)
    if n < min_n:
        return BucketStats(bucket, n)
    ups = np.array([r.uplift_pct for r in recs], dtype=np.float64)
    wins = sum(1 for r in recs if Winner(r.winner) is Winner.ONEINCH)
    draws = sum(1 for r in recs if Winner(r.winner) is Winner.DRAW)
    pct = {f"p{q:02d}": percentile(ups, q) for q in PERCENTILES}
    return BucketStats(
        bucket,
        n,
        mean=float(ups.mean()),
        wr_out=wins / n,
        parity=draws / n,
        lr_out=(n - wins - draws) / n,
        **pct,
    )


def bucket_summary(
    records: Iterable, scheme: str, *, min_n: int = DEFAULT_MIN_N, include_total: bool = True
) -> list[BucketStats]:
    """One row per non-empty bucket in scheme order, plus a grand-totals row.

    Rows with fewer than ``min_n`` records keep their count but carry no
    statistics.
    """
    by_bucket: dict[str, list] = {label: [] for label in bucket_labels(scheme)}
    everything = []
    for r in records:
        label = r.bucket if getattr(r, "bucket_scheme", None) == scheme else assign_bucket(r.v_in_usd, scheme)
        by_bucket[label].append(r)
        everything.append(r)
    rows = [_stats_for(label, recs, min_n) for label, recs in by_bucket.items() if recs]
    if include_total and everything:
        rows.append(_stats_for(TOTAL_LABEL, everything, min_n))
    return rows
