"""Histogram data files of uplift percentages."""

from __future__ import annotations

from .. import kernels
from .mart import EmptyScope, Scope, select

DEFAULT_WINDOW = 1.5
DEFAULT_BINS = 60


def histogram(values, window: float = DEFAULT_WINDOW, bins: int = DEFAULT_BINS, group: str = "all") -> dict:
    """Uniform bins over [-window, window]; out-of-window values go to overflow counters."""
    if not window > 0 or bins < 1:
        raise ValueError("window must be positive and bins >= 1")
    counts, low, high = kernels.bin_counts(list(values), -window, window, bins)
    return {
        "group": group,
        "window": [-window, window],
        "bins": bins,
        "bin_width": 2 * window / bins,
        "counts": [int(c) for c in counts],
        "overflow_low": low,
        "overflow_high": high,
        "n": int(counts.sum()) + low + high,
    }


def emit_histogram(
    source,
    scope: Scope | None = None,
    window: float = DEFAULT_WINDOW,
    bins: int = DEFAULT_BINS,
    group: str | None = None,
) -> dict:
    recs = select(source, scope or Scope())
    if not recs:
        raise EmptyScope("no records match the scope")
    if group is None:
        names = sorted({r.competitor for r in recs})
        group = names[0] if len(names) == 1 else "all"
    return histogram([r.uplift_pct for r in recs], window, bins, group)
