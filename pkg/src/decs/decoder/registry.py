"""Selector registry: which (contract, selector) pairs are known swap methods."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from ..errors import InputFormatError
from .abi import AbiType, parse_type

REQUIRED_ROLES = ("src_token", "dst_token", "amount_in")
OPTIONAL_ROLES = ("min_out", "deadline", "recipient")

# A role locator is a parameter index, optionally drilling into a tuple
# member (``"0.2"``) and/or an array element (``"2[-1]"``), or ``"tx.value"``.
_LOCATOR = re.compile(r"^(\d+)(?:\.(\d+))?(?:\[(-?\d+)\])?$")


class RegistryError(InputFormatError):
    reason = "registry_error"


class DecodeLookupError(InputFormatError):
    """Calldata does not map to a registered swap method."""


class UnknownContract(DecodeLookupError):
    reason = "UnknownContract"


class UnknownSelector(DecodeLookupError):
    reason = "UnknownSelector"


class CalldataTooShort(DecodeLookupError):
    reason = "CalldataTooShort"


@dataclass(frozen=True)
class Locator:
    param: int | None
    member: int | None = None
    element: int | None = None

    @property
    def from_tx_value(self) -> bool:
        return self.param is None

    @classmethod
    def parse(cls, text: int | str) -> Locator:
        if isinstance(text, bool):
            raise RegistryError(f"bad role locator {text!r}")
        if isinstance(text, int):
            return cls(text)
        if text == "tx.value":
            return cls(None)
        m = _LOCATOR.match(str(text))
        if not m:
            raise RegistryError(f"bad role locator {text!r}")
        member = None if m.group(2) is None else int(m.group(2))
        element = None if m.group(3) is None else int(m.group(3))
        return cls(int(m.group(1)), member, element)


@dataclass(frozen=True)
class FunctionSig:
    name: str
    protocol: str
    params: tuple[AbiType, ...]
    semantics: dict[str, Locator]
    exact_output: bool = False

    def __post_init__(self) -> None:
        missing = [r for r in REQUIRED_ROLES if r not in self.semantics]
        if missing:
            raise RegistryError(f"{self.name}: semantics lacks {missing}")
        for role, loc in self.semantics.items():
            if role not in REQUIRED_ROLES + OPTIONAL_ROLES:
                raise RegistryError(f"{self.name}: unknown role {role!r}")
            if loc.param is not None and loc.param >= len(self.params):
                raise RegistryError(f"{self.name}: role {role} points past parameter list")

    def __hash__(self) -> int:
        return hash((self.name, self.protocol, self.params))


def _norm_addr(text: str) -> str:
    text = text.lower()
    if not re.fullmatch(r"0x[0-9a-f]{40}", text):
        raise RegistryError(f"bad address {text!r}")
    return text


def _norm_selector(text: str) -> bytes:
    if not re.fullmatch(r"0x[0-9a-fA-F]{8}", text):
        raise RegistryError(f"bad selector {text!r}")
    return bytes.fromhex(text[2:])


class SelectorRegistry:
    """Immutable map (contract address, 4-byte selector) -> FunctionSig."""

    def __init__(self, entries: dict[tuple[str, bytes], FunctionSig]) -> None:
        self._entries = dict(entries)
        self._contracts = {addr for addr, _ in self._entries}

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, key: tuple[str, bytes]) -> bool:
        return key in self._entries

    def items(self):
        return self._entries.items()

    def contracts(self) -> set[str]:
        return set(self._contracts)

    def lookup(self, contract: str, selector: bytes) -> FunctionSig:
        contract = contract.lower()
        if contract not in self._contracts:
            raise UnknownContract(f"no registry entries for {contract}")
        try:
            return self._entries[(contract, bytes(selector))]
        except KeyError:
            raise UnknownSelector(f"selector 0x{bytes(selector).hex()} unknown for {contract}") from None

    @classmethod
    def from_json(cls, entries: list[dict], chain_id: int | None = None) -> SelectorRegistry:
        out: dict[tuple[str, bytes], FunctionSig] = {}
        for i, e in enumerate(entries):
            try:
                if chain_id is not None and e.get("chain_id", chain_id) != chain_id:
                    continue
                sig = FunctionSig(
                    name=e["name"],
                    protocol=e["protocol"],
                    params=tuple(parse_type(p) for p in e["params"]),
                    semantics={role: Locator.parse(loc) for role, loc in e["semantics"].items()},
                    exact_output=bool(e.get("exact_output", False)),
                )
                key = (_norm_addr(e["contract"]), _norm_selector(e["selector"]))
            except (KeyError, TypeError, AttributeError) as exc:
                raise RegistryError(f"registry entry {i}: {exc!r}") from None
            if key in out:
                raise RegistryError(f"duplicate selector 0x{key[1].hex()} for {key[0]}")
            out[key] = sig
        return cls(out)

    @classmethod
    def load(cls, path: str | Path, chain_id: int | None = None) -> SelectorRegistry:
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise RegistryError(f"{path}: {exc}") from None
        if not isinstance(data, list):
            raise RegistryError(f"{path}: expected a JSON list")
        return cls.from_json(data, chain_id)


def match_selector(calldata: bytes, recipient: str, registry: SelectorRegistry) -> FunctionSig:
    if len(calldata) < 4:
        raise CalldataTooShort(f"calldata is {len(calldata)} bytes")
    return registry.lookup(recipient, calldata[:4])
