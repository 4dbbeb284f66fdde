"""Execution backends: the synthetic AMM engine and a trace-RPC adapter."""

from __future__ import annotations

import itertools
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any, Protocol

from ..decoder.abi import AbiError, decode, parse_type
from .amm import PoolSet, SimulationError, swap_cpmm

DEFAULT_BASE_GAS = 21_000


@dataclass(frozen=True)
class TraceStep:
    pool_id: str
    amount_in: int
    amount_out: int
    gas: int


@dataclass(frozen=True)
class SimulationTrace:
    steps: tuple[TraceStep, ...]
    reverted: bool = False
    revert_reason: str | None = None
    base_gas: int = DEFAULT_BASE_GAS

    @property
    def gas_total(self) -> int:
        return self.base_gas + sum(s.gas for s in self.steps)


class ExecutionBackend(Protocol):
    def execute(self, request: Any, pools: PoolSet) -> SimulationTrace: ...


class SyntheticAmmBackend:
    """Executes a request's route hop by hop on a private copy of the snapshot."""

    def __init__(self, base_gas: int = DEFAULT_BASE_GAS) -> None:
        self.base_gas = base_gas

    def execute(self, request: Any, pools: PoolSet) -> SimulationTrace:
        state = pools.as_dict()
        route = request.route
        amount = request.intent.amount_in
        steps: list[TraceStep] = []
        for pool_id, token_in in zip(route.hops, route.token_path):
            try:
                pool = state[pool_id]
                out, state[pool_id] = swap_cpmm(pool, token_in, amount)
            except KeyError:
                return SimulationTrace(tuple(steps), True, f"UnknownPool:{pool_id}", self.base_gas)
            except SimulationError as exc:
                return SimulationTrace(tuple(steps), True, exc.reason, self.base_gas)
            steps.append(TraceStep(pool_id, amount, out, pool.gas_per_swap))
            amount = out
        return SimulationTrace(tuple(steps), False, None, self.base_gas)


# ------------------------------------------------------------ trace RPC

Transport = Callable[[dict], dict]

_AMOUNTS = [parse_type("uint256[]")]


class TraceRpcBackend:
    """Simulates through a ``debug_traceCall`` JSON-RPC endpoint.

    ``transport`` posts one JSON-RPC request dict and returns the response
    dict. ``encode_calldata`` turns a request into router calldata; building
    live-chain calldata is the caller's concern. The call's return data is
    expected to be the router's ``uint256[] amounts`` array.
    """

    def __init__(
        self,
        transport: Transport,
        encode_calldata: Callable[[Any], bytes],
        *,
        tracer: str = "callTracer",
    ) -> None:
        self.transport = transport
        self.encode_calldata = encode_calldata
        self.tracer = tracer
        self._ids = itertools.count(1)

    def build_payload(self, request: Any) -> dict:
        call = {
            "from": request.wallet.address if request.wallet is not None else None,
            "to": request.target,
            "gas": hex(request.gas_limit),
            "gasPrice": hex(request.gas_price),
            "data": "0x" + self.encode_calldata(request).hex(),
        }
        return {
            "jsonrpc": "2.0",
            "id": next(self._ids),
            "method": "debug_traceCall",
            "params": [call, hex(request.sim_block), {"tracer": self.tracer}],
        }

    def execute(self, request: Any, pools: PoolSet) -> SimulationTrace:
        response = self.transport(self.build_payload(request))
        if "error" in response:
            err = response["error"]
            return SimulationTrace((), True, f"rpc:{err.get('message', err)}", 0)
        result = response.get("result") or {}
        gas = int(result.get("gasUsed", "0x0"), 16)
        if result.get("error"):
            return SimulationTrace((), True, result.get("revertReason") or result["error"], gas)
        try:
            (amounts,) = decode(_AMOUNTS, bytes.fromhex(result.get("output", "0x")[2:])).values
        except (AbiError, ValueError) as exc:
            return SimulationTrace((), True, f"unparseable output: {exc}", gas)
        hops = request.route.hops
        if len(amounts) != len(hops) + 1:
            return SimulationTrace((), True, "amounts/route length mismatch", gas)
        steps = tuple(TraceStep(h, a, b, 0) for h, a, b in zip(hops, amounts, amounts[1:]))
        return SimulationTrace(steps, False, None, gas)


class CannedTransport:
    """Test transport: replays a fixed response per call, recording payloads."""

    def __init__(self, responses: list[dict]) -> None:
        self._responses = list(responses)
        self.requests: list[dict] = []

    def __call__(self, payload: dict) -> dict:
        self.requests.append(payload)
        resp = dict(self._responses.pop(0))
        resp.setdefault("jsonrpc", "2.0")
        resp.setdefault("id", payload["id"])
        return resp
