"""A deliberately small Solidity ABI v2 codec.

Supported types: ``uintN`` (N = 8..256, step 8), ``address``, ``bool``,
``bytesN`` (1..32), dynamic ``bytes``, one-level dynamic arrays ``T[]`` of
static ``T``, and flat tuples whose members are basic types (static or
``bytes``). Anything nested deeper raises :class:`UnsupportedType`.

Decoding is strict: every read is bounds-checked against the buffer and
padding bytes must be zero, so garbled input yields a typed error rather
than a plausible-looking wrong value.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..errors import InputFormatError

WORD = 32


class AbiError(InputFormatError):
    reason = "abi_error"


class UnsupportedType(AbiError):
    reason = "UnsupportedType"


class OffsetOutOfBounds(AbiError):
    reason = "OffsetOutOfBounds"


class WordUnderflow(AbiError):
    reason = "WordUnderflow"


class LengthOverflow(AbiError):
    reason = "LengthOverflow"


class InvalidPadding(AbiError):
    reason = "InvalidPadding"


class EncodeError(AbiError):
    reason = "EncodeError"


BASIC_KINDS = ("uint", "address", "bool", "bytesN", "bytes")


@dataclass(frozen=True)
class AbiType:
    """``kind`` is one of uint, address, bool, bytesN, bytes, array, tuple."""

    kind: str
    size: int = 0
    children: tuple[AbiType, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.kind == "uint" and not (8 <= self.size <= 256 and self.size % 8 == 0):
            raise UnsupportedType(f"uint{self.size}")
        if self.kind == "bytesN" and not 1 <= self.size <= 32:
            raise UnsupportedType(f"bytes{self.size}")
        if self.kind == "array":
            if len(self.children) != 1:
                raise UnsupportedType("array needs one element type")
            if self.children[0].is_dynamic:
                raise UnsupportedType(f"array of dynamic {self.children[0]}")
        if self.kind == "tuple":
            if not self.children:
                raise UnsupportedType("empty tuple")
            for child in self.children:
                if child.kind not in BASIC_KINDS:
                    raise UnsupportedType(f"nested composite {child} inside tuple")
        if self.kind not in BASIC_KINDS + ("array", "tuple"):
            raise UnsupportedType(self.kind)

    @property
    def is_dynamic(self) -> bool:
        if self.kind in ("bytes", "array"):
            return True
        if self.kind == "tuple":
            return any(c.is_dynamic for c in self.children)
        return False

    @property
    def head_size(self) -> int:
        if self.is_dynamic:
            return WORD
        if self.kind == "tuple":
            return sum(c.head_size for c in self.children)
        return WORD

    def __str__(self) -> str:
        if self.kind == "uint":
            return f"uint{self.size}"
        if self.kind == "bytesN":
            return f"bytes{self.size}"
        if self.kind == "array":
            return f"{self.children[0]}[]"
        if self.kind == "tuple":
            return "(" + ",".join(str(c) for c in self.children) + ")"
        return self.kind


_UINT = re.compile(r"uint(\d*)$")
_BYTESN = re.compile(r"bytes(\d+)$")


def _split_top(inner: str) -> list[str]:
    parts, depth, start = [], 0, 0
    for i, ch in enumerate(inner):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append(inner[start:i])
            start = i + 1
    parts.append(inner[start:])
    return [p.strip() for p in parts]


def parse_type(text: str) -> AbiType:
    """Parse canonical Solidity type notation, e.g. ``(address,uint256)[]``."""
    text = text.strip()
    if text.endswith("[]"):
        return AbiType("array", children=(parse_type(text[:-2]),))
    if text.endswith("]"):
        raise UnsupportedType(f"fixed-size array {text}")
    if text.startswith("(") and text.endswith(")"):
        return AbiType("tuple", children=tuple(parse_type(p) for p in _split_top(text[1:-1])))
    if text in ("address", "bool", "bytes"):
        return AbiType(text)
    m = _UINT.match(text)
    if m:
        return AbiType("uint", int(m.group(1) or 256))
    m = _BYTESN.match(text)
    if m:
        return AbiType("bytesN", int(m.group(1)))
    raise UnsupportedType(text)


# ----------------------------------------------------------------- encoding


def _pad_right(data: bytes) -> bytes:
    return data + b"\x00" * (-len(data) % WORD)


def _encode_static(t: AbiType, value) -> bytes:
    if t.kind == "uint":
        if isinstance(value, bool) or not isinstance(value, int) or value < 0 or value >> t.size:
            raise EncodeError(f"{value!r} is not a {t}")
        return value.to_bytes(WORD, "big")
    if t.kind == "address":
        raw = bytes.fromhex(value[2:]) if isinstance(value, str) else bytes(value)
        if len(raw) != 20:
            raise EncodeError(f"{value!r} is not an address")
        return b"\x00" * 12 + raw
    if t.kind == "bool":
        if not isinstance(value, bool):
            raise EncodeError(f"{value!r} is not a bool")
        return int(value).to_bytes(WORD, "big")
    if t.kind == "bytesN":
        if not isinstance(value, (bytes, bytearray)) or len(value) != t.size:
            raise EncodeError(f"{value!r} is not {t}")
        return _pad_right(bytes(value))
    if t.kind == "tuple":
        return _encode_sequence(t.children, value)
    raise EncodeError(f"{t} is not static")


def _encode_value(t: AbiType, value) -> bytes:
    if t.kind == "bytes":
        if not isinstance(value, (bytes, bytearray)):
            raise EncodeError(f"{value!r} is not bytes")
        return len(value).to_bytes(WORD, "big") + _pad_right(bytes(value))
    if t.kind == "array":
        elem = t.children[0]
        return len(value).to_bytes(WORD, "big") + b"".join(_encode_static(elem, v) for v in value)
    if t.kind == "tuple" and t.is_dynamic:
        return _encode_sequence(t.children, value)
    return _encode_static(t, value)


def _encode_sequence(types: tuple[AbiType, ...] | list[AbiType], values) -> bytes:
    values = list(values)
    if len(values) != len(types):
        raise EncodeError(f"expected {len(types)} values, got {len(values)}")
    heads, tails = [], []
    head_len = sum(t.head_size for t in types)
    for t, v in zip(types, values):
        if t.is_dynamic:
            heads.append((head_len + sum(len(x) for x in tails)).to_bytes(WORD, "big"))
            tails.append(_encode_value(t, v))
        else:
            heads.append(_encode_static(t, v))
    return b"".join(heads) + b"".join(tails)


def encode(types: list[AbiType], values: list) -> bytes:
    """ABI-encode ``values`` (without selector)."""
    return _encode_sequence(types, values)


def encode_call(selector: bytes, types: list[AbiType], values: list) -> bytes:
    if len(selector) != 4:
        raise EncodeError("selector must be 4 bytes")
    return bytes(selector) + encode(types, values)


# ----------------------------------------------------------------- decoding


class _Reader:
    def __init__(self, data: bytes) -> None:
        self.data = data
        self.high_water = 0

    def word(self, pos: int) -> bytes:
        if pos < 0 or pos + WORD > len(self.data):
            raise WordUnderflow(f"need 32 bytes at {pos}, buffer is {len(self.data)}")
        self.high_water = max(self.high_water, pos + WORD)
        return self.data[pos : pos + WORD]

    def uint_word(self, pos: int) -> int:
        return int.from_bytes(self.word(pos), "big")

    def span(self, pos: int, length: int) -> bytes:
        if pos + length > len(self.data):
            raise LengthOverflow(f"{length} bytes at {pos} exceed buffer of {len(self.data)}")
        self.high_water = max(self.high_water, pos + length)
        return self.data[pos : pos + length]

    def offset(self, base: int, head_pos: int) -> int:
        off = self.uint_word(head_pos)
        target = base + off
        if off >> 64 or target >= len(self.data):
            raise OffsetOutOfBounds(f"offset {off} (from {base}) outside buffer of {len(self.data)}")
        return target


def _decode_static(r: _Reader, t: AbiType, pos: int):
    if t.kind == "tuple":
        return _decode_sequence(r, t.children, pos)
    w = r.word(pos)
    if t.kind == "uint":
        v = int.from_bytes(w, "big")
        if v >> t.size:
            raise InvalidPadding(f"value does not fit {t}")
        return v
    if t.kind == "address":
        if any(w[:12]):
            raise InvalidPadding("dirty address padding")
        return "0x" + w[12:].hex()
    if t.kind == "bool":
        v = int.from_bytes(w, "big")
        if v > 1:
            raise InvalidPadding("bool word is not 0 or 1")
        return bool(v)
    if t.kind == "bytesN":
        if any(w[t.size :]):
            raise InvalidPadding(f"dirty {t} padding")
        return w[: t.size]
    raise UnsupportedType(str(t))


def _decode_tail(r: _Reader, t: AbiType, pos: int):
    if t.kind == "bytes":
        length = r.uint_word(pos)
        if length > len(r.data):
            raise LengthOverflow(f"declared length {length} exceeds buffer")
        body = r.span(pos + WORD, length)
        pad = r.span(pos + WORD + length, -length % WORD)
        if any(pad):
            raise InvalidPadding("dirty bytes padding")
        return body
    if t.kind == "array":
        count = r.uint_word(pos)
        elem = t.children[0]
        if count * elem.head_size > len(r.data) - pos - WORD:
            raise LengthOverflow(f"array length {count} exceeds buffer")
        start = pos + WORD
        return [_decode_static(r, elem, start + i * elem.head_size) for i in range(count)]
    if t.kind == "tuple":
        return _decode_sequence(r, t.children, pos)
    raise UnsupportedType(str(t))


def _decode_sequence(r: _Reader, types, base: int) -> tuple:
    out, pos = [], base
    for t in types:
        if t.is_dynamic:
            out.append(_decode_tail(r, t, r.offset(base, pos)))
        else:
            out.append(_decode_static(r, t, pos))
        pos += t.head_size
    return tuple(out)


@dataclass(frozen=True)
class Decoded:
    values: tuple
    trailing_bytes: int


def decode(types: list[AbiType], data: bytes) -> Decoded:
    """Decode an argument blob (no selector). Reports unread trailing bytes."""
    r = _Reader(bytes(data))
    values = _decode_sequence(r, types, 0)
    return Decoded(values, len(r.data) - r.high_water)
