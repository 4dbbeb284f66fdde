"""Calldata decoding: selector lookup, ABI decode, normalization to SwapIntent."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import InputFormatError
from ..ingest import RawTransaction
from . import abi
from .abi import AbiError, AbiType, Decoded, decode, encode, encode_call, parse_type
from .registry import (
    CalldataTooShort,
    DecodeLookupError,
    FunctionSig,
    Locator,
    RegistryError,
    SelectorRegistry,
    UnknownContract,
    UnknownSelector,
    match_selector,
)

NATIVE_SENTINEL = "0xeeeeeeeeeeeeeeeeeeeeeeeeeeeeeeeeeeeeeeee"


class NormalizeError(InputFormatError):
    reason = "normalize_error"


class SemanticsMissing(NormalizeError):
    reason = "SemanticsMissing"


class ZeroAmount(NormalizeError):
    reason = "ZeroAmount"


@dataclass(frozen=True)
class SwapIntent:
    src_token: str
    dst_token: str
    amount_in: int
    origin: str
    protocol: str
    exact_output: bool = False
    min_out: int | None = None
    deadline: int | None = None

    def __post_init__(self) -> None:
        if self.amount_in <= 0:
            raise ZeroAmount("amount_in must be positive")


def abi_decode(calldata: bytes, sig: FunctionSig) -> Decoded:
    """Decode the arguments following the 4-byte selector."""
    return decode(list(sig.params), calldata[4:])


def _resolve(loc: Locator, values: tuple, raw: RawTransaction, role: str):
    if loc.from_tx_value:
        return raw.value
    try:
        v = values[loc.param]
        if loc.member is not None:
            v = v[loc.member]
        if loc.element is not None:
            v = v[loc.element]
    except (IndexError, TypeError):
        raise SemanticsMissing(f"role {role} does not resolve in decoded values") from None
    return v


def normalize(
    decoded: tuple | list | Decoded,
    sig: FunctionSig,
    raw: RawTransaction,
    *,
    wrapped_native: str | None = None,
) -> SwapIntent:
    """Map decoded arguments onto swap roles.

    With ``wrapped_native`` set, the native-token placeholder address is
    replaced by that ERC-20 so the pair can be routed.
    """
    values = tuple(decoded.values if isinstance(decoded, Decoded) else decoded)
    if len(values) != len(sig.params):
        raise SemanticsMissing(f"expected {len(sig.params)} decoded values, got {len(values)}")
    roles = {role: _resolve(loc, values, raw, role) for role, loc in sig.semantics.items()}
    for role in ("src_token", "dst_token"):
        if not isinstance(roles[role], str):
            raise SemanticsMissing(f"role {role} is not an address")
    for role in ("amount_in", "min_out", "deadline"):
        if role in roles and (isinstance(roles[role], bool) or not isinstance(roles[role], int)):
            raise SemanticsMissing(f"role {role} is not an integer")
    if roles["amount_in"] == 0:
        raise ZeroAmount(f"{raw.tx_hash}: zero input amount")

    src, dst = roles["src_token"].lower(), roles["dst_token"].lower()
    if wrapped_native is not None:
        src = wrapped_native.lower() if src == NATIVE_SENTINEL else src
        dst = wrapped_native.lower() if dst == NATIVE_SENTINEL else dst
    return SwapIntent(
        src_token=src,
        dst_token=dst,
        amount_in=roles["amount_in"],
        origin=raw.tx_hash,
        protocol=sig.protocol,
        exact_output=sig.exact_output,
        min_out=roles.get("min_out"),
        deadline=roles.get("deadline"),
    )


def decode_transaction(
    raw: RawTransaction, registry: SelectorRegistry, *, wrapped_native: str | None = None
) -> SwapIntent:
    sig = match_selector(raw.calldata, raw.recipient, registry)
    return normalize(abi_decode(raw.calldata, sig), sig, raw, wrapped_native=wrapped_native)


__all__ = [
    "NATIVE_SENTINEL",
    "AbiError",
    "AbiType",
    "CalldataTooShort",
    "DecodeLookupError",
    "Decoded",
    "FunctionSig",
    "Locator",
    "NormalizeError",
    "RegistryError",
    "SelectorRegistry",
    "SemanticsMissing",
    "SwapIntent",
    "UnknownContract",
    "UnknownSelector",
    "ZeroAmount",
    "abi",
    "abi_decode",
    "decode",
    "decode_transaction",
    "encode",
    "encode_call",
    "match_selector",
    "normalize",
    "parse_type",
]
