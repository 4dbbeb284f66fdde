"""Rebuilding an incoming swap as an equivalent baseline-router trade."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

from .decoder import SwapIntent
from .errors import DecsError
from .ingest import RawTransaction
from .simulator import PoolSet, SimulationError, swap_cpmm
from .wallets import Wallet

DEFAULT_MAX_HOPS = 3


class BuildError(DecsError):
    reason = "build_error"


class NoRoute(BuildError):
    reason = "NoRoute"


class ExactOutputUnsupported(BuildError):
    reason = "exact_output"


@dataclass(frozen=True)
class Route:
    hops: tuple[str, ...]
    token_path: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(self.token_path) != len(self.hops) + 1:
            raise ValueError("token_path must be one longer than hops")


@dataclass(frozen=True)
class TradeRequest:
    intent: SwapIntent
    wallet: Wallet | None
    target: str
    route: Route
    gas_price: int
    gas_limit: int
    sim_block: int


def quote_path(pools: PoolSet, hops: tuple[str, ...], token_path: tuple[str, ...], amount_in: int) -> int | None:
    """Output of executing ``hops`` in sequence, or None if any hop rounds to zero."""
    state: dict[str, object] = {}
    amount = amount_in
    for pool_id, token_in in zip(hops, token_path):
        pool = state.get(pool_id) or pools[pool_id]
        try:
            amount, state[pool_id] = swap_cpmm(pool, token_in, amount)
        except SimulationError:
            return None
    return amount


def _simple_paths(pools: PoolSet, src: str, dst: str, max_hops: int):
    # Simple in tokens (hence also in pools), deterministic pool-id order.
    stack = [(src, (), (src,))]
    while stack:
        token, hops, path = stack.pop()
        for pool in reversed(pools.pools_touching(token)):
            nxt = pool.other(token)
            if nxt in path:
                continue
            new_hops, new_path = hops + (pool.id,), path + (nxt,)
            if nxt == dst:
                yield new_hops, new_path
            elif len(new_hops) < max_hops:
                stack.append((nxt, new_hops, new_path))


def find_route(src: str, dst: str, amount_in: int, pools: PoolSet, max_hops: int = DEFAULT_MAX_HOPS) -> Route:
    """Best simple path of at most ``max_hops`` pools by simulated output.

    Ties go to fewer hops, then to the lexicographically smaller pool-id
    sequence.
    """
    if src == dst:
        raise NoRoute(f"degenerate pair {src} -> {dst}")
    best_key = None
    best = None
    for hops, path in _simple_paths(pools, src, dst, max_hops):
        out = quote_path(pools, hops, path, amount_in)
        if out is None:
            continue
        key = (-out, len(hops), hops)
        if best_key is None or key < best_key:
            best_key, best = key, Route(hops, path)
    if best is None:
        raise NoRoute(f"no route {src} -> {dst} within {max_hops} hops")
    return best


class RouteFinder(Protocol):
    def find(self, src: str, dst: str, amount_in: int, pools: PoolSet) -> Route: ...


class ExhaustiveRouter:
    """Route finder over the pools of selected venues (all venues when None)."""

    def __init__(self, venues: set[str] | None = None, max_hops: int = DEFAULT_MAX_HOPS) -> None:
        self.venues = None if venues is None else frozenset(venues)
        self.max_hops = max_hops

    def find(self, src: str, dst: str, amount_in: int, pools: PoolSet) -> Route:
        return find_route(src, dst, amount_in, pools.restricted(self.venues), self.max_hops)


def build_equivalent(
    intent: SwapIntent,
    wallet: Wallet | None,
    incoming: RawTransaction,
    router: RouteFinder,
    pools: PoolSet,
    target: str,
) -> TradeRequest:
    """Trade request on ``target`` with the incoming transaction's gas settings."""
    if intent.exact_output:
        raise ExactOutputUnsupported(f"{intent.origin}: exact-output swaps are not rebuilt")
    route = router.find(intent.src_token, intent.dst_token, intent.amount_in, pools)
    return TradeRequest(
        intent=intent,
        wallet=wallet,
        target=target,
        route=route,
        gas_price=incoming.gas_price,
        gas_limit=incoming.gas_limit,
        sim_block=incoming.observed_block,
    )
