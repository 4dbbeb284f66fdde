"""Per-comparison scoring: effective amounts, parity band, winner, uplift."""

from __future__ import annotations

import enum
import math
from collections.abc import Iterable

from ..errors import DecsError
from ..simulator import ExecutionResult
from .prices import PriceQuote

WEI_PER_NATIVE = 10**18


class MetricsError(DecsError):
    reason = "metrics_error"


class RevertedInput(MetricsError):
    reason = "RevertedInput"


class ZeroVolume(MetricsError):
    reason = "ZeroVolume"


class NoLosses(MetricsError):
    """Win/loss ratio is undefined when the competitor never won."""

    reason = "NoLosses"


class Winner(str, enum.Enum):
    ONEINCH = "oneinch"
    DRAW = "draw"
    COMPETITOR = "competitor"


class Mode(str, enum.Enum):
    CLASSIC = "classic"
    INTENT = "intent"


def parity_threshold(v_in_usd: float) -> float:
    if v_in_usd < 0:
        raise ValueError("volume must be non-negative")
    if v_in_usd < 10_000:
        return 1.0
    if v_in_usd < 100_000:
        return 5.0
    if v_in_usd < 500_000:
        return 10.0
    return 50.0


def effective_amount(
    result: ExecutionResult,
    p_dst: PriceQuote,
    *,
    gas_price: int,
    p_native: PriceQuote | None,
    mode: Mode | str = Mode.CLASSIC,
) -> float:
    """USD value received, minus the USD gas cost in classic mode.

    ``gas_price`` is in wei. Intent fills already carry the filler's gas in
    the output amount, so intent mode has no gas term.
    """
    if result.reverted:
        raise RevertedInput("cannot score a reverted execution")
    received = p_dst.to_usd(result.actual_out)
    if Mode(mode) is Mode.INTENT:
        return received
    if p_native is None:
        raise MetricsError("classic mode needs a native-token price")
    cost_native = result.gas_used * gas_price / WEI_PER_NATIVE
    return received - cost_native * p_native.usd_price


def determine_winner(a_eff_in: float, a_eff_out: float, epsilon: float) -> Winner:
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    if a_eff_out - a_eff_in > epsilon:
        return Winner.ONEINCH
    if abs(a_eff_in - a_eff_out) <= epsilon:
        return Winner.DRAW
    return Winner.COMPETITOR


def uplift(a_eff_in: float, a_eff_out: float, v_in_usd: float) -> tuple[float, float]:
    """(USD uplift, uplift as a percentage of input volume)."""
    usd = a_eff_out - a_eff_in
    if not v_in_usd > 0:
        raise ZeroVolume("input volume must be positive for a relative uplift")
    return usd, 100.0 * usd / v_in_usd


def count_winners(winners: Iterable[Winner | str]) -> dict[Winner, int]:
    counts = {w: 0 for w in Winner}
    for w in winners:
        counts[Winner(w)] += 1
    return counts


def winrate(winners: Iterable[Winner | str]) -> float:
    """Ratio of baseline wins to competitor wins."""
    counts = count_winners(winners)
    return win_loss_ratio(counts[Winner.ONEINCH], counts[Winner.COMPETITOR])


def win_loss_ratio(wins: int, losses: int) -> float:
    if losses == 0:
        raise NoLosses(f"{wins} wins and no losses")
    return wins / losses


def win_share(winners: Iterable[Winner | str]) -> float:
    """Share of comparisons the baseline won (the "% won" column)."""
    counts = count_winners(winners)
    total = sum(counts.values())
    return counts[Winner.ONEINCH] / total if total else math.nan


def render_ratio(ratio: float | None) -> str:
    if ratio is None or math.isinf(ratio):
        return "undefined"
    return f"{math.floor(ratio + 0.5)}x"


BUCKET_SCHEMES: dict[str, tuple[tuple[float, str], ...]] = {
    # (exclusive upper edge, label); the last entry is open-ended.
    "classic3": (
        (10_000, "<$10k"),
        (100_000, "$10k–100k"),
        (math.inf, ">$100k"),
    ),
    "intent7": (
        (1_000, "<$1k"),
        (10_000, "$1k–10k"),
        (50_000, "$10k–50k"),
        (100_000, "$50k–100k"),
        (500_000, "$100k–500k"),
        (1_000_000, "$500k–1m"),
        (math.inf, ">$1m"),
    ),
    "fine9": (
        (100, "<$100"),
        (500, "$100–500"),
        (1_000, "$500–1k"),
        (5_000, "$1k–5k"),
        (10_000, "$5k–10k"),
        (50_000, "$10k–50k"),
        (100_000, "$50k–100k"),
        (500_000, "$100k–500k"),
        (math.inf, ">$500k"),
    ),
}


def bucket_labels(scheme: str) -> list[str]:
    return [label for _, label in BUCKET_SCHEMES[scheme]]


def assign_bucket(v_in_usd: float, scheme: str) -> str:
    if v_in_usd < 0 or math.isnan(v_in_usd):
        raise ValueError("volume must be non-negative")
    try:
        edges = BUCKET_SCHEMES[scheme]
    except KeyError:
        raise ValueError(f"unknown bucket scheme {scheme!r}") from None
    for upper, label in edges:
        if v_in_usd < upper:
            return label
    return edges[-1][1]
