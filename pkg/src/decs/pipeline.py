"""Feed-to-store comparison run.

Every input line ends in exactly one outcome: a kept ComparisonRecord or a
drop with a reason, so ``input_lines == kept + sum(drops)`` always holds.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .builder import DEFAULT_MAX_HOPS, BuildError, ExhaustiveRouter, TradeRequest, build_equivalent
from .decoder import NATIVE_SENTINEL, AbiError, DecodeLookupError, NormalizeError, SelectorRegistry, SwapIntent, decode_transaction
from .errors import InputFormatError
from .ingest import Kind, RawTransaction, Rejected, open_feed, read_feed
from .metrics import (
    Candidate,
    ChainConfig,
    ComparisonRecord,
    Mode,
    PriceBook,
    apply_filters,
    attach_prices,
    score,
)
from .reporting import RecordStore
from .simulator import ExecutionResult, PoolSet, SyntheticAmmBackend, parse_trace, simulate
from .wallets import NoEligibleWallet, WalletPool, select_wallet

DEFAULT_BASELINE_ROUTER = "0x1111111254eeb25477b68fb85ed929f73a960582"
DEFAULT_SCHEME = {Mode.CLASSIC: "classic3", Mode.INTENT: "intent7"}

# Reasons a line can be dropped before metrics filtering sees it.
STAGE_REASONS = (
    "mode_mismatch",
    "unknown_chain",
    "non_swap",
    "decode_error",
    "no_snapshot",
    "no_eligible_wallet",
    "no_route",
)


@dataclass(frozen=True)
class RunConfig:
    mode: Mode = Mode.CLASSIC
    bucket_scheme: str | None = None
    baseline_router: str = DEFAULT_BASELINE_ROUTER
    # Gas price for rebuilt trades in intent mode; required there, no default.
    intent_gas_price: int | None = None
    max_hops: int = DEFAULT_MAX_HOPS

    def __post_init__(self) -> None:
        if self.mode is Mode.INTENT and self.intent_gas_price is None:
            raise InputFormatError("intent mode needs an instant-preset gas price")

    @property
    def scheme(self) -> str:
        return self.bucket_scheme or DEFAULT_SCHEME[self.mode]


@dataclass
class RunInputs:
    pools: dict[int, PoolSet]
    prices: PriceBook
    wallets: WalletPool
    chains: dict[int, ChainConfig]
    registry: SelectorRegistry | None = None


@dataclass
class RunResult:
    input_lines: int = 0
    records: list[ComparisonRecord] = field(default_factory=list)
    drops: Counter = field(default_factory=Counter)

    @property
    def kept(self) -> int:
        return len(self.records)

    def summary(self) -> dict:
        return {
            "input_lines": self.input_lines,
            "kept": self.kept,
            "dropped": sum(self.drops.values()),
            "drop_reasons": dict(sorted(self.drops.items())),
        }


class _Dropped(Exception):
    def __init__(self, reason: str) -> None:
        super().__init__(reason)
        self.reason = reason


def _incoming_router(protocol: str, pools: PoolSet, max_hops: int) -> ExhaustiveRouter:
    # The observed swap only had its own venue's pools; unlabeled fixtures fall back to all.
    venues = {protocol} if any(p.venue == protocol for p in pools) else None
    return ExhaustiveRouter(venues, max_hops)


class Pipeline:
    def __init__(self, inputs: RunInputs, config: RunConfig) -> None:
        self.inputs = inputs
        self.config = config
        self.backend = SyntheticAmmBackend()
        self.router = ExhaustiveRouter(None, config.max_hops)

    def _execute(self, req: TradeRequest, pools: PoolSet) -> ExecutionResult:
        return parse_trace(simulate(req, self.backend, pools), req)

    def _pools_at(self, block: int) -> PoolSet:
        pools = self.inputs.pools.get(block)
        if pools is None:
            raise _Dropped("no_snapshot")
        return pools

    def _outgoing(self, intent: SwapIntent, raw: RawTransaction, gas_price: int, pools: PoolSet) -> ExecutionResult:
        cfg = self.config
        try:
            wallet = self._wallet(intent, raw.gas_limit * gas_price)
            req = build_equivalent(intent, wallet, raw, self.router, pools, cfg.baseline_router)
        except BuildError as exc:
            raise _Dropped("no_route") from exc
        if gas_price != req.gas_price:
            req = TradeRequest(req.intent, req.wallet, req.target, req.route, gas_price, req.gas_limit, req.sim_block)
        return self._execute(req, pools)

    def _wallet(self, intent: SwapIntent, gas_reserve: int):
        try:
            return select_wallet(self.inputs.wallets, intent, gas_reserve, self.config.baseline_router)
        except NoEligibleWallet as exc:
            raise _Dropped("no_eligible_wallet") from exc

    def _classic(self, raw: RawTransaction, chain: ChainConfig) -> Candidate:
        try:
            intent = decode_transaction(raw, self.inputs.registry, wrapped_native=chain.native_token)
        except DecodeLookupError as exc:
            raise _Dropped("non_swap") from exc
        except (AbiError, NormalizeError) as exc:
            raise _Dropped("decode_error") from exc
        cand = Candidate(
            tx_hash=raw.tx_hash,
            chain_id=raw.chain_id,
            mode=Mode.CLASSIC,
            competitor=intent.protocol,
            intent=intent,
            sim_block=raw.observed_block,
            mined_block=raw.mined_block,
            incoming_gas_price=raw.gas_price,
            outgoing_gas_price=raw.gas_price,
        )
        if raw.mined_block is None or intent.exact_output:
            return cand
        pools = self._pools_at(raw.observed_block)
        try:
            route = _incoming_router(intent.protocol, pools, self.config.max_hops).find(
                intent.src_token, intent.dst_token, intent.amount_in, pools
            )
        except BuildError as exc:
            raise _Dropped("no_route") from exc
        incoming = TradeRequest(intent, None, raw.recipient, route, raw.gas_price, raw.gas_limit, raw.observed_block)
        cand.incoming = self._execute(incoming, pools)
        cand.outgoing = self._outgoing(intent, raw, raw.gas_price, pools)
        return cand

    def _intent(self, raw: RawTransaction, chain: ChainConfig) -> Candidate:
        fill = raw.intent_fill

        def erc20(token: str) -> str:
            return chain.native_token if token == NATIVE_SENTINEL else token

        intent = SwapIntent(
            src_token=erc20(fill.src_token),
            dst_token=erc20(fill.dst_token),
            amount_in=fill.amount_in,
            origin=raw.tx_hash,
            protocol=fill.protocol,
        )
        gas_price = self.config.intent_gas_price
        cand = Candidate(
            tx_hash=raw.tx_hash,
            chain_id=raw.chain_id,
            mode=Mode.INTENT,
            competitor=fill.protocol,
            intent=intent,
            sim_block=raw.observed_block,
            mined_block=fill.fill_block,
            incoming_gas_price=0,
            outgoing_gas_price=gas_price,
            incoming=ExecutionResult(fill.amount_in, fill.amount_out, 0),
        )
        cand.outgoing = self._outgoing(intent, raw, gas_price, self._pools_at(raw.observed_block))
        return cand

    def candidate(self, raw: RawTransaction) -> Candidate:
        chain = self.inputs.chains.get(raw.chain_id)
        if chain is None:
            raise _Dropped("unknown_chain")
        intent_line = raw.kind is Kind.INTENT_ORDER
        if intent_line != (self.config.mode is Mode.INTENT):
            raise _Dropped("mode_mismatch")
        cand = self._intent(raw, chain) if intent_line else self._classic(raw, chain)
        return attach_prices(cand, self.inputs.prices, chain.native_token)

    def run(self, items) -> RunResult:
        result = RunResult()
        for item in items:
            result.input_lines += 1
            if isinstance(item, Rejected):
                result.drops[f"rejected:{item.reason}"] += 1
                continue
            try:
                cand = self.candidate(item)
            except _Dropped as d:
                result.drops[d.reason] += 1
                continue
            kept, dropped = apply_filters([cand], self.inputs.chains)
            if dropped:
                result.drops[dropped[0][1]] += 1
            else:
                result.records.append(score(kept[0], self.config.scheme))
        return result


def run_feed(feed_path: str | Path, inputs: RunInputs, config: RunConfig) -> RunResult:
    with open_feed(feed_path, "replay") as feed:
        return Pipeline(inputs, config).run(read_feed(feed))


def write_outputs(result: RunResult, out_dir: str | Path) -> RecordStore:
    """Append kept records to the store in ``out_dir`` plus CSV and drop summary."""
    store = RecordStore(out_dir)
    store.append(result.records)
    store.export_csv()
    (Path(out_dir) / "drops.json").write_text(json.dumps(result.summary(), indent=2, sort_keys=True) + "\n")
    return store
