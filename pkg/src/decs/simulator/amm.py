"""Constant-product pools in exact integer arithmetic."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from ..errors import DecsError, InputFormatError

PPM = 1_000_000


class SimulationError(DecsError):
    reason = "simulation_error"


class UnknownToken(SimulationError):
    reason = "UnknownToken"


class OutputZero(SimulationError):
    reason = "OutputZero"


class InvalidAmount(SimulationError):
    reason = "InvalidAmount"


@dataclass(frozen=True)
class Pool:
    id: str
    token0: str
    token1: str
    reserve0: int
    reserve1: int
    fee_ppm: int = 3000
    gas_per_swap: int = 60_000
    venue: str = ""

    def __post_init__(self) -> None:
        if self.reserve0 <= 0 or self.reserve1 <= 0:
            raise ValueError(f"pool {self.id}: reserves must be positive")
        if not 0 <= self.fee_ppm < PPM:
            raise ValueError(f"pool {self.id}: fee_ppm out of range")
        if self.token0 == self.token1:
            raise ValueError(f"pool {self.id}: identical tokens")

    def other(self, token: str) -> str:
        if token == self.token0:
            return self.token1
        if token == self.token1:
            return self.token0
        raise UnknownToken(f"{token} not in pool {self.id}")

    def reserves_for(self, token_in: str) -> tuple[int, int]:
        if token_in == self.token0:
            return self.reserve0, self.reserve1
        if token_in == self.token1:
            return self.reserve1, self.reserve0
        raise UnknownToken(f"{token_in} not in pool {self.id}")


def amount_out_cpmm(reserve_in: int, reserve_out: int, amount_in: int, fee_ppm: int) -> int:
    amount_in_eff = amount_in * (PPM - fee_ppm) // PPM
    return reserve_out * amount_in_eff // (reserve_in + amount_in_eff)


def swap_cpmm(pool: Pool, token_in: str, amount_in: int) -> tuple[int, Pool]:
    """Swap ``amount_in`` of ``token_in``; returns the output and the post-trade pool.

    The full input (fee included) stays in the pool.
    """
    if isinstance(amount_in, bool) or not isinstance(amount_in, int) or amount_in <= 0:
        raise InvalidAmount(f"amount_in must be a positive integer, got {amount_in!r}")
    reserve_in, reserve_out = pool.reserves_for(token_in)
    out = amount_out_cpmm(reserve_in, reserve_out, amount_in, pool.fee_ppm)
    if out == 0:
        raise OutputZero(f"pool {pool.id}: {amount_in} in rounds to zero out")
    if token_in == pool.token0:
        return out, replace(pool, reserve0=pool.reserve0 + amount_in, reserve1=pool.reserve1 - out)
    return out, replace(pool, reserve0=pool.reserve0 - out, reserve1=pool.reserve1 + amount_in)


class PoolSet:
    """Immutable, block-stamped pool snapshot."""

    def __init__(self, pools: list[Pool] | tuple[Pool, ...], block_number: int) -> None:
        by_id: dict[str, Pool] = {}
        for p in pools:
            if p.id in by_id:
                raise ValueError(f"duplicate pool id {p.id}")
            by_id[p.id] = p
        self._pools = by_id
        self.block_number = block_number
        adjacency: dict[str, list[Pool]] = {}
        for p in sorted(by_id.values(), key=lambda p: p.id):
            adjacency.setdefault(p.token0, []).append(p)
            adjacency.setdefault(p.token1, []).append(p)
        self._adjacency = adjacency

    def __getitem__(self, pool_id: str) -> Pool:
        return self._pools[pool_id]

    def __contains__(self, pool_id: str) -> bool:
        return pool_id in self._pools

    def __iter__(self):
        return iter(sorted(self._pools.values(), key=lambda p: p.id))

    def __len__(self) -> int:
        return len(self._pools)

    def pools_touching(self, token: str) -> list[Pool]:
        return list(self._adjacency.get(token, ()))

    def restricted(self, venues: set[str] | frozenset[str] | None) -> PoolSet:
        if venues is None:
            return self
        return PoolSet([p for p in self if p.venue in venues], self.block_number)

    def as_dict(self) -> dict[str, Pool]:
        """A private mutable copy of the id -> pool mapping."""
        return dict(self._pools)


def _hex(obj: dict, key: str) -> int:
    v = obj[key]
    if isinstance(v, str) and v.startswith("0x"):
        return int(v, 16)
    raise InputFormatError(f"pool field {key}: expected 0x-hex, got {v!r}")


def pool_from_json(obj: dict) -> Pool:
    try:
        return Pool(
            id=str(obj["id"]),
            token0=obj["token0"].lower(),
            token1=obj["token1"].lower(),
            reserve0=_hex(obj, "reserve0"),
            reserve1=_hex(obj, "reserve1"),
            fee_ppm=int(obj["fee_ppm"]),
            gas_per_swap=int(obj["gas_per_swap"]),
            venue=str(obj.get("venue", "")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputFormatError(f"bad pool entry: {exc!r}") from None


def pool_to_json(p: Pool) -> dict:
    out = {
        "id": p.id,
        "token0": p.token0,
        "token1": p.token1,
        "reserve0": hex(p.reserve0),
        "reserve1": hex(p.reserve1),
        "fee_ppm": p.fee_ppm,
        "gas_per_swap": p.gas_per_swap,
    }
    if p.venue:
        out["venue"] = p.venue
    return out


def poolset_from_json(obj: dict) -> PoolSet:
    if not isinstance(obj, dict) or "block_number" not in obj or "pools" not in obj:
        raise InputFormatError("pool file needs block_number and pools")
    try:
        return PoolSet([pool_from_json(p) for p in obj["pools"]], int(obj["block_number"]))
    except ValueError as exc:
        raise InputFormatError(str(exc)) from None


def load_pools(path: str | Path) -> dict[int, PoolSet]:
    """Load a pool file: one snapshot object, or a list of them keyed by block."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"{path}: {exc}") from None
    snapshots = data if isinstance(data, list) else [data]
    out: dict[int, PoolSet] = {}
    for snap in snapshots:
        ps = poolset_from_json(snap)
        if ps.block_number in out:
            raise InputFormatError(f"{path}: two snapshots for block {ps.block_number}")
        out[ps.block_number] = ps
    return out
