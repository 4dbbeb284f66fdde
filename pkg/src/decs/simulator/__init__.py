"""Trade execution against pluggable backends, and trace parsing."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .amm import (
    PPM,
    InvalidAmount,
    OutputZero,
    Pool,
    PoolSet,
    SimulationError,
    UnknownToken,
    amount_out_cpmm,
    load_pools,
    pool_from_json,
    pool_to_json,
    poolset_from_json,
    swap_cpmm,
)
from .backends import (
    DEFAULT_BASE_GAS,
    CannedTransport,
    ExecutionBackend,
    SimulationTrace,
    SyntheticAmmBackend,
    TraceRpcBackend,
    TraceStep,
)


class BlockMismatch(SimulationError):
    reason = "BlockMismatch"


@dataclass(frozen=True)
class ExecutionResult:
    actual_in: int
    actual_out: int
    gas_used: int
    reverted: bool = False
    revert_reason: str | None = None

    def to_json(self) -> dict:
        return {
            "actual_in": str(self.actual_in),
            "actual_out": str(self.actual_out),
            "gas_used": self.gas_used,
            "reverted": self.reverted,
            "revert_reason": self.revert_reason,
        }


def simulate(request: Any, backend: ExecutionBackend, pools: PoolSet) -> SimulationTrace:
    if pools.block_number != request.sim_block:
        raise BlockMismatch(f"snapshot is block {pools.block_number}, request wants {request.sim_block}")
    return backend.execute(request, pools)


def parse_trace(trace: SimulationTrace, request: Any) -> ExecutionResult:
    amount_in = request.intent.amount_in
    if trace.reverted:
        return ExecutionResult(amount_in, 0, trace.gas_total, True, trace.revert_reason or "reverted")
    if not trace.steps:
        return ExecutionResult(amount_in, 0, trace.gas_total, True, "RevertedTrace:empty_route")
    return ExecutionResult(amount_in, trace.steps[-1].amount_out, trace.gas_total, False, None)


__all__ = [
    "DEFAULT_BASE_GAS",
    "PPM",
    "BlockMismatch",
    "CannedTransport",
    "ExecutionBackend",
    "ExecutionResult",
    "InvalidAmount",
    "OutputZero",
    "Pool",
    "PoolSet",
    "SimulationError",
    "SimulationTrace",
    "SyntheticAmmBackend",
    "TraceRpcBackend",
    "TraceStep",
    "UnknownToken",
    "amount_out_cpmm",
    "load_pools",
    "parse_trace",
    "pool_from_json",
    "pool_to_json",
    "poolset_from_json",
    "simulate",
    "swap_cpmm",
]
