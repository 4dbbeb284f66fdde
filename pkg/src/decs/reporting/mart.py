"""Benchmark tables aggregated from comparison records."""

from __future__ import annotations

import csv
import io
import json
from collections.abc import Iterable
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ..errors import EmptyResultError, InputFormatError
from ..metrics import BUCKET_SCHEMES, Mode, NoLosses, Winner, assign_bucket, render_ratio, win_loss_ratio
from ..stats import BucketStats, bucket_summary, percentile

ROW_LABELS = (("TOTAL", None), ("1inch", Winner.ONEINCH), ("Parity", Winner.DRAW), ("Competitors", Winner.COMPETITOR))


class EmptyScope(EmptyResultError):
    reason = "EmptyScope"


@dataclass(frozen=True)
class Scope:
    chains: tuple[int, ...] | None = None
    mode: Mode | None = None
    competitors: tuple[str, ...] | None = None
    bucket_scheme: str | None = None
    bucket: str | None = None
    block_range: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        if self.bucket is not None and self.bucket_scheme is None:
            raise InputFormatError("scope.bucket needs scope.bucket_scheme")
        if self.bucket_scheme is not None and self.bucket_scheme not in BUCKET_SCHEMES:
            raise InputFormatError(f"unknown bucket scheme {self.bucket_scheme!r}")

    @classmethod
    def from_json(cls, obj: dict) -> Scope:
        known = {"chains", "mode", "competitors", "bucket_scheme", "bucket", "block_range"}
        extra = set(obj) - known
        if extra:
            raise InputFormatError(f"unknown scope keys {sorted(extra)}")
        try:
            return cls(
                chains=None if obj.get("chains") is None else tuple(int(c) for c in obj["chains"]),
                mode=None if obj.get("mode") is None else Mode(obj["mode"]),
                competitors=None if obj.get("competitors") is None else tuple(obj["competitors"]),
                bucket_scheme=obj.get("bucket_scheme"),
                bucket=obj.get("bucket"),
                block_range=None if obj.get("block_range") is None else tuple(obj["block_range"]),
            )
        except (TypeError, ValueError) as exc:
            raise InputFormatError(f"bad scope: {exc}") from None

    @classmethod
    def load(cls, path: str | Path | None) -> Scope:
        if path is None:
            return cls()
        try:
            return cls.from_json(json.loads(Path(path).read_text()))
        except json.JSONDecodeError as exc:
            raise InputFormatError(f"{path}: {exc}") from None

    def to_json(self) -> dict:
        out = asdict(self)
        if self.mode is not None:
            out["mode"] = self.mode.value
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in out.items()}

    def matches(self, r) -> bool:
        if self.chains is not None and r.chain_id not in self.chains:
            return False
        if self.mode is not None and Mode(r.mode) is not self.mode:
            return False
        if self.competitors is not None and r.competitor not in self.competitors:
            return False
        if self.block_range is not None and not self.block_range[0] <= r.sim_block <= self.block_range[1]:
            return False
        if self.bucket is not None:
            label = r.bucket if r.bucket_scheme == self.bucket_scheme else assign_bucket(r.v_in_usd, self.bucket_scheme)
            if label != self.bucket:
                return False
        return True


def select(source, scope: Scope) -> list:
    records = source.records() if hasattr(source, "records") else source
    return [r for r in records if scope.matches(r)]


@dataclass(frozen=True)
class MartRow:
    winner: str
    comparisons: int
    pct_won: float | None
    p05: float | None
    median: float | None
    mean: float | None
    p95: float | None


@dataclass(frozen=True)
class MartFooter:
    total_volume_usd: float
    total_uplift_usd: float
    total_uplift_pct: float
    win_loss_ratio: float | None
    win_loss_display: str


@dataclass(frozen=True)
class BenchTable:
    scope: Scope
    rows: tuple[MartRow, ...]
    footer: MartFooter

    def row(self, label: str) -> MartRow:
        return next(r for r in self.rows if r.winner == label)

    def to_json(self) -> dict:
        return {
            "scope": self.scope.to_json(),
            "rows": [asdict(r) for r in self.rows],
            "footer": asdict(self.footer),
        }


def _row(label: str, ups: list[float], total: int, is_total: bool) -> MartRow:
    if not ups:
        return MartRow(label, 0, None if is_total else 0.0, None, None, None, None)
    arr = np.array(ups, dtype=np.float64)
    return MartRow(
        winner=label,
        comparisons=len(ups),
        pct_won=None if is_total else 100.0 * len(ups) / total,
        p05=percentile(arr, 5),
        median=percentile(arr, 50),
        mean=float(arr.mean()),
        p95=percentile(arr, 95),
    )


def build_mart(source, scope: Scope | None = None) -> BenchTable:
    """Per-winner USD uplift table over the records in ``scope``."""
    scope = scope or Scope()
    recs = select(source, scope)
    if not recs:
        raise EmptyScope("no records match the scope")
    total = len(recs)
    rows = []
    for label, winner in ROW_LABELS:
        ups = [r.uplift_usd for r in recs if winner is None or Winner(r.winner) is winner]
        rows.append(_row(label, ups, total, winner is None))
    volume = float(sum(r.v_in_usd for r in recs))
    gained = float(sum(r.uplift_usd for r in recs))
    wins = rows[1].comparisons
    losses = rows[3].comparisons
    try:
        ratio = win_loss_ratio(wins, losses)
    except NoLosses:
        ratio = None
    footer = MartFooter(
        total_volume_usd=volume,
        total_uplift_usd=gained,
        total_uplift_pct=100.0 * gained / volume if volume > 0 else 0.0,
        win_loss_ratio=ratio,
        win_loss_display=render_ratio(ratio),
    )
    return BenchTable(scope, tuple(rows), footer)


def build_bucket_table(source, scope: Scope, scheme: str, min_n: int = 5) -> list[BucketStats]:
    recs = select(source, scope)
    if not recs:
        raise EmptyScope("no records match the scope")
    return bucket_summary(recs, scheme, min_n=min_n)


# ------------------------------------------------------------ formatting


def fmt_usd(x: float | None) -> str:
    if x is None:
        return "-"
    sign = "-" if x < 0 else ""
    return f"{sign}${abs(x):,.2f}"


def fmt_pct(x: float | None) -> str:
    return "N/A" if x is None else f"{x:.2f}%"


def mart_csv(table: BenchTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["Winner", "Comparisons", "% won", "p05", "Median", "Mean", "p95"])
    for r in table.rows:
        w.writerow(
            [
                r.winner,
                r.comparisons,
                "-" if r.pct_won is None else fmt_pct(r.pct_won),
                fmt_usd(r.p05),
                fmt_usd(r.median),
                fmt_usd(r.mean),
                fmt_usd(r.p95),
            ]
        )
    f = table.footer
    w.writerow(["Total volume of analysed transactions", fmt_usd(f.total_volume_usd)])
    w.writerow(["Total uplift", f"{fmt_usd(f.total_uplift_usd)} ({fmt_pct(f.total_uplift_pct)})"])
    w.writerow(["Times 1inch is better than nearest competitor", f.win_loss_display])
    return buf.getvalue()


BUCKET_COLUMNS = ("p05", "p10", "p25", "p50", "mean", "p75", "p90", "p95")


def bucket_csv(rows: Iterable[BucketStats]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["Bucket", "n", *BUCKET_COLUMNS, "WR_out", "Parity", "LR_out"])
    for r in rows:
        shares = [None if v is None else 100.0 * v for v in (r.wr_out, r.parity, r.lr_out)]
        w.writerow([r.bucket, r.n, *(fmt_pct(getattr(r, c)) for c in BUCKET_COLUMNS), *(fmt_pct(s) for s in shares)])
    return buf.getvalue()
