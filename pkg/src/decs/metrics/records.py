"""Comparison candidates, filtering, and the scored ComparisonRecord."""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass, field, fields

from ..decoder import SwapIntent
from ..simulator import ExecutionResult
from .chains import ChainConfig, check_freshness
from .core import Mode, Winner, assign_bucket, determine_winner, effective_amount, parity_threshold, uplift
from .prices import MissingPrice, MixedPriceSources, PriceBook, PriceQuote, PriceSource

SCHEMA_VERSION = 1

DROP_REASONS = (
    "never_mined",
    "exact_output",
    "reverted",
    "stale_block",
    "missing_price",
    "mixed_price_sources",
)


@dataclass
class Candidate:
    """Everything gathered for one incoming/outgoing pair before scoring."""

    tx_hash: str
    chain_id: int
    mode: Mode
    competitor: str
    intent: SwapIntent
    sim_block: int
    mined_block: int | None
    incoming_gas_price: int
    outgoing_gas_price: int
    incoming: ExecutionResult | None = None
    outgoing: ExecutionResult | None = None
    price_source: PriceSource | None = None
    quotes: dict[str, PriceQuote] = field(default_factory=dict)
    native_token: str = ""
    price_problem: str | None = None


def attach_prices(cand: Candidate, book: PriceBook, native_token: str) -> Candidate:
    """Price src, dst and native from a single source, or record why not."""
    tokens = [cand.intent.src_token, cand.intent.dst_token, native_token]
    cand.native_token = native_token.lower()
    try:
        cand.price_source, cand.quotes = book.consistent_quotes(tokens, cand.sim_block)
        cand.price_problem = None
    except (MissingPrice, MixedPriceSources) as exc:
        cand.price_problem = exc.reason
    return cand


def drop_reason(cand: Candidate, cfg: ChainConfig) -> str | None:
    if cand.mined_block is None:
        return "never_mined"
    if cand.intent.exact_output:
        return "exact_output"
    if cand.incoming is None or cand.outgoing is None or cand.incoming.reverted or cand.outgoing.reverted:
        return "reverted"
    if not check_freshness(cand.mined_block, cand.sim_block, cfg):
        return "stale_block"
    if cand.price_problem is not None:
        return cand.price_problem
    return None


def apply_filters(
    candidates: Iterable[Candidate], chains: dict[int, ChainConfig]
) -> tuple[list[Candidate], list[tuple[Candidate, str]]]:
    """Split candidates into (kept, [(dropped, reason)]), preserving order."""
    kept: list[Candidate] = []
    dropped: list[tuple[Candidate, str]] = []
    for cand in candidates:
        reason = drop_reason(cand, chains[cand.chain_id])
        if reason is None:
            kept.append(cand)
        else:
            dropped.append((cand, reason))
    return kept, dropped


def summarize_drops(dropped: Iterable[tuple[object, str]]) -> dict[str, int]:
    counts = Counter(reason for _, reason in dropped)
    return dict(sorted(counts.items()))


@dataclass(frozen=True)
class ComparisonRecord:
    tx_hash: str
    chain_id: int
    mode: Mode
    competitor: str
    src_token: str
    dst_token: str
    amount_in: int
    sim_block: int
    mined_block: int
    incoming: ExecutionResult
    incoming_gas_price: int
    outgoing: ExecutionResult
    outgoing_gas_price: int
    price_source: PriceSource
    v_in_usd: float
    a_eff_in: float
    a_eff_out: float
    epsilon_usd: float
    winner: Winner
    uplift_usd: float
    uplift_pct: float
    bucket: str
    bucket_scheme: str
    schema_version: int = SCHEMA_VERSION

    def to_json(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, ExecutionResult):
                v = v.to_json()
            elif isinstance(v, (Mode, Winner, PriceSource)):
                v = v.value
            elif f.name == "amount_in":
                v = str(v)
            out[f.name] = v
        return out

    @classmethod
    def from_json(cls, obj: dict) -> ComparisonRecord:
        data = dict(obj)
        for side in ("incoming", "outgoing"):
            r = data[side]
            data[side] = ExecutionResult(
                int(r["actual_in"]), int(r["actual_out"]), r["gas_used"], r["reverted"], r.get("revert_reason")
            )
        data["mode"] = Mode(data["mode"])
        data["winner"] = Winner(data["winner"])
        data["price_source"] = PriceSource(data["price_source"])
        data["amount_in"] = int(data["amount_in"])
        return cls(**data)

    def csv_row(self) -> dict:
        row = self.to_json()
        for side in ("incoming", "outgoing"):
            r = row.pop(side)
            for k, v in r.items():
                row[f"{side}_{k}"] = v
        return row


_SIDE_COLUMNS = ("actual_in", "actual_out", "gas_used", "reverted", "revert_reason")



def _csv_columns() -> list[str]:
    cols = []
    for f in fields(ComparisonRecord):
        if f.name in ("incoming", "outgoing"):
            cols.extend(f"{f.name}_{k}" for k in _SIDE_COLUMNS)
        else:
            cols.append(f.name)
    return cols


CSV_COLUMNS = _csv_columns()


def score(cand: Candidate, scheme: str) -> ComparisonRecord:
    """Turn a kept candidate into a ComparisonRecord."""
    intent, quotes = cand.intent, cand.quotes
    p_src, p_dst = quotes[intent.src_token], quotes[intent.dst_token]
    p_native = quotes[cand.native_token]
    v_in = p_src.to_usd(intent.amount_in)
    if cand.mode is Mode.CLASSIC:
        a_in = effective_amount(cand.incoming, p_dst, gas_price=cand.incoming_gas_price, p_native=p_native)
    else:
        a_in = effective_amount(cand.incoming, p_dst, gas_price=0, p_native=None, mode=Mode.INTENT)
    a_out = effective_amount(cand.outgoing, p_dst, gas_price=cand.outgoing_gas_price, p_native=p_native)
    eps = parity_threshold(v_in)
    up_usd, up_pct = uplift(a_in, a_out, v_in)
    return ComparisonRecord(
        tx_hash=cand.tx_hash,
        chain_id=cand.chain_id,
        mode=cand.mode,
        competitor=cand.competitor,
        src_token=intent.src_token,
        dst_token=intent.dst_token,
        amount_in=intent.amount_in,
        sim_block=cand.sim_block,
        mined_block=cand.mined_block,
        incoming=cand.incoming,
        incoming_gas_price=cand.incoming_gas_price,
        outgoing=cand.outgoing,
        outgoing_gas_price=cand.outgoing_gas_price,
        price_source=cand.price_source,
        v_in_usd=v_in,
        a_eff_in=a_in,
        a_eff_out=a_out,
        epsilon_usd=eps,
        winner=determine_winner(a_in, a_out, eps),
        uplift_usd=up_usd,
        uplift_pct=up_pct,
        bucket=assign_bucket(v_in, scheme),
        bucket_scheme=scheme,
    )


__all__ = [
    "CSV_COLUMNS",
    "DROP_REASONS",
    "SCHEMA_VERSION",
    "Candidate",
    "ComparisonRecord",
    "apply_filters",
    "attach_prices",
    "drop_reason",
    "score",
    "summarize_drops",
]
