"""USD price quotes per token and block, with a primary and a fallback source."""

from __future__ import annotations

import bisect
import csv
import enum
from collections.abc import Iterable
from dataclasses import dataclass
from pathlib import Path

from ..errors import InputFormatError


class PriceSource(str, enum.Enum):
    PRIMARY = "primary_engine"
    SPOT = "spot_fallback"


SOURCE_PREFERENCE = (PriceSource.PRIMARY, PriceSource.SPOT)


class PriceError(Exception):
    reason = "price_error"


class MissingPrice(PriceError):
    reason = "missing_price"


class MixedPriceSources(PriceError):
    reason = "mixed_price_sources"


@dataclass(frozen=True)
class PriceQuote:
    token: str
    usd_price: float
    decimals: int
    source: PriceSource
    block: int

    def __post_init__(self) -> None:
        if not self.usd_price > 0:
            raise ValueError(f"{self.token}: usd_price must be positive")
        if not 0 <= self.decimals <= 36:
            raise ValueError(f"{self.token}: decimals out of range")

    def to_usd(self, amount: int) -> float:
        return amount / 10**self.decimals * self.usd_price


class PriceBook:
    """Latest quote at or before a block, per (token, source)."""

    def __init__(self, quotes: Iterable[PriceQuote]) -> None:
        series: dict[tuple[str, PriceSource], list[PriceQuote]] = {}
        for q in quotes:
            series.setdefault((q.token, q.source), []).append(q)
        self._series = {k: sorted(v, key=lambda q: q.block) for k, v in series.items()}
        self._blocks = {k: [q.block for q in v] for k, v in self._series.items()}

    def quote(self, token: str, block: int, source: PriceSource) -> PriceQuote | None:
        key = (token.lower(), source)
        blocks = self._blocks.get(key)
        if not blocks:
            return None
        i = bisect.bisect_right(blocks, block)
        return self._series[key][i - 1] if i else None

    def consistent_quotes(self, tokens: Iterable[str], block: int) -> tuple[PriceSource, dict[str, PriceQuote]]:
        """Quotes for every token from one source, preferring the primary engine.

        Raises MissingPrice if some token has no quote anywhere, and
        MixedPriceSources if each token is priced but no single source covers all.
        """
        tokens = sorted({t.lower() for t in tokens})
        for source in SOURCE_PREFERENCE:
            quotes = {t: self.quote(t, block, source) for t in tokens}
            if all(q is not None for q in quotes.values()):
                return source, quotes
        for t in tokens:
            if all(self.quote(t, block, s) is None for s in SOURCE_PREFERENCE):
                raise MissingPrice(f"no price for {t} at block {block}")
        raise MixedPriceSources(f"no single price source covers {tokens} at block {block}")


def load_prices(path: str | Path) -> PriceBook:
    """CSV with header ``token,block,usd_price,source`` and optional ``decimals``."""
    quotes = []
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        need = {"token", "block", "usd_price", "source"}
        if reader.fieldnames is None or not need <= set(reader.fieldnames):
            raise InputFormatError(f"{path}: price CSV needs columns {sorted(need)}")
        for n, row in enumerate(reader, start=2):
            try:
                quotes.append(
                    PriceQuote(
                        token=row["token"].strip().lower(),
                        usd_price=float(row["usd_price"]),
                        decimals=int(row.get("decimals") or 18),
                        source=PriceSource(row["source"].strip()),
                        block=int(row["block"]),
                    )
                )
            except ValueError as exc:
                raise InputFormatError(f"{path}:{n}: {exc}") from None
    return PriceBook(quotes)


def write_prices(path: str | Path, quotes: Iterable[PriceQuote]) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["token", "block", "usd_price", "source", "decimals"])
        for q in quotes:
            w.writerow([q.token, q.block, repr(q.usd_price), q.source.value, q.decimals])
