"""Feed ingestion: JSONL replay files and line-oriented sockets.

Each feed line is one JSON object. Lines that fail to parse are not skipped;
they surface as :class:`Rejected` items carrying a reason code so that
``emitted + rejected == lines read`` can always be checked.
"""

from __future__ import annotations

import enum
import json
import socket
from collections.abc import Iterator
from dataclasses import dataclass
from pathlib import Path

from .errors import InputFormatError

__all__ = [
    "Feed",
    "IntentFill",
    "Kind",
    "RawTransaction",
    "Rejected",
    "RecordError",
    "open_feed",
    "parse_record",
    "read_feed",
    "serialize_record",
]


class RecordError(InputFormatError):
    """A single feed record is invalid."""


class Kind(str, enum.Enum):
    MINED = "mined"
    MEMPOOL = "mempool"
    INTENT_ORDER = "intent_order"


@dataclass(frozen=True)
class IntentFill:
    src_token: str
    dst_token: str
    amount_in: int
    amount_out: int
    fill_block: int
    protocol: str

    def __post_init__(self) -> None:
        if self.amount_in <= 0:
            raise RecordError("intent fill amount_in must be positive", reason="invalid_intent_fill")
        if self.amount_out < 0:
            raise RecordError("intent fill amount_out must be non-negative", reason="invalid_intent_fill")


@dataclass(frozen=True)
class RawTransaction:
    chain_id: int
    tx_hash: str
    sender: str
    recipient: str
    value: int
    gas_price: int
    gas_limit: int
    calldata: bytes
    observed_block: int
    kind: Kind
    mined_block: int | None = None
    intent_fill: IntentFill | None = None

    def __post_init__(self) -> None:
        if len(bytes.fromhex(self.tx_hash[2:])) != 32:
            raise RecordError(f"tx_hash must be 32 bytes: {self.tx_hash}", reason="bad_length")
        if self.mined_block is not None and self.mined_block < self.observed_block:
            raise RecordError("mined_block precedes observed_block", reason="block_order")
        if self.kind is Kind.INTENT_ORDER and self.intent_fill is None:
            raise RecordError("intent_order record lacks intent_fill", reason="MissingIntentFill")


@dataclass(frozen=True)
class Rejected:
    """A feed line that could not be turned into a RawTransaction."""

    line_no: int
    reason: str
    detail: str


# ------------------------------------------------------------------ parsing

_REQUIRED = (
    "chain_id",
    "tx_hash",
    "from",
    "to",
    "value",
    "gas_price",
    "gas_limit",
    "input",
    "observed_block",
    "kind",
)


def _hex_bytes(obj: dict, key: str) -> bytes:
    text = obj[key]
    if not isinstance(text, str) or not text.startswith(("0x", "0X")):
        raise RecordError(f"{key}: expected 0x-prefixed hex", reason="non_hex")
    body = text[2:]
    if len(body) % 2:
        raise RecordError(f"{key}: odd-length hex", reason="non_hex")
    try:
        return bytes.fromhex(body)
    except ValueError:
        raise RecordError(f"{key}: not hex", reason="non_hex") from None


def _hex_uint(obj: dict, key: str, bits: int = 256) -> int:
    text = obj[key]
    if isinstance(text, bool) or not isinstance(text, str):
        raise RecordError(f"{key}: expected hex string", reason="non_hex")
    if text.startswith("-"):
        raise RecordError(f"{key}: negative", reason="negative")
    if not text.startswith(("0x", "0X")) or len(text) == 2:
        raise RecordError(f"{key}: expected 0x-prefixed hex", reason="non_hex")
    try:
        value = int(text[2:], 16)
    except ValueError:
        raise RecordError(f"{key}: not hex", reason="non_hex") from None
    if value >> bits:
        raise RecordError(f"{key}: exceeds uint{bits}", reason="overflow")
    return value


def _uint(obj: dict, key: str) -> int:
    value = obj[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise RecordError(f"{key}: expected integer", reason="non_integer")
    if value < 0:
        raise RecordError(f"{key}: negative", reason="negative")
    return value


def _address(obj: dict, key: str) -> str:
    raw = _hex_bytes(obj, key)
    if len(raw) != 20:
        raise RecordError(f"{key}: address must be 20 bytes", reason="bad_length")
    return "0x" + raw.hex()


def _parse_fill(obj: object) -> IntentFill:
    if not isinstance(obj, dict):
        raise RecordError("intent_fill must be an object", reason="invalid_intent_fill")
    missing = [k for k in ("src_token", "dst_token", "amount_in", "amount_out", "fill_block", "protocol") if k not in obj]
    if missing:
        raise RecordError(f"intent_fill missing {missing}", reason="missing_field")
    if not isinstance(obj["protocol"], str):
        raise RecordError("intent_fill.protocol must be a string", reason="invalid_intent_fill")
    return IntentFill(
        src_token=_address(obj, "src_token"),
        dst_token=_address(obj, "dst_token"),
        amount_in=_hex_uint(obj, "amount_in"),
        amount_out=_hex_uint(obj, "amount_out"),
        fill_block=_uint(obj, "fill_block"),
        protocol=obj["protocol"],
    )


def parse_record(line: str) -> RawTransaction:
    """Parse one feed line into a :class:`RawTransaction`.

    Raises :class:`RecordError` with a reason code on any schema violation.
    """
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise RecordError(f"invalid JSON: {exc.msg}", reason="invalid_json") from None
    if not isinstance(obj, dict):
        raise RecordError("record must be a JSON object", reason="invalid_json")
    missing = [k for k in _REQUIRED if k not in obj]
    if missing:
        raise RecordError(f"missing required field(s) {missing}", reason="missing_field")
    try:
        kind = Kind(obj["kind"])
    except ValueError:
        raise RecordError(f"unknown kind {obj['kind']!r}", reason="unknown_kind") from None

    mined = obj.get("mined_block")
    fill = obj.get("intent_fill")
    return RawTransaction(
        chain_id=_uint(obj, "chain_id"),
        tx_hash="0x" + _hex_bytes(obj, "tx_hash").hex(),
        sender=_address(obj, "from"),
        recipient=_address(obj, "to"),
        value=_hex_uint(obj, "value"),
        gas_price=_hex_uint(obj, "gas_price"),
        gas_limit=_uint(obj, "gas_limit"),
        calldata=_hex_bytes(obj, "input"),
        observed_block=_uint(obj, "observed_block"),
        kind=kind,
        mined_block=None if mined is None else _uint(obj, "mined_block"),
        intent_fill=None if fill is None else _parse_fill(fill),
    )


def serialize_record(raw: RawTransaction) -> str:
    """Canonical JSONL form; ``parse_record(serialize_record(r)) == r``."""
    obj: dict = {
        "chain_id": raw.chain_id,
        "tx_hash": raw.tx_hash,
        "from": raw.sender,
        "to": raw.recipient,
        "value": hex(raw.value),
        "gas_price": hex(raw.gas_price),
        "gas_limit": raw.gas_limit,
        "input": "0x" + raw.calldata.hex(),
        "observed_block": raw.observed_block,
        "kind": raw.kind.value,
    }
    if raw.mined_block is not None:
        obj["mined_block"] = raw.mined_block
    if raw.intent_fill is not None:
        f = raw.intent_fill
        obj["intent_fill"] = {
            "src_token": f.src_token,
            "dst_token": f.dst_token,
            "amount_in": hex(f.amount_in),
            "amount_out": hex(f.amount_out),
            "fill_block": f.fill_block,
            "protocol": f.protocol,
        }
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# ------------------------------------------------------------------ feeds


class Feed:
    """Iterator over raw feed lines (``bytes``, newline stripped).

    Replay mode reads a file in order. Stream mode reads from a TCP
    ``host:port``; when the peer closes, a trailing partial line (no newline)
    is discarded and iteration ends.
    """

    def __init__(self, source: str | Path, mode: str = "replay", *, timeout: float | None = 30.0) -> None:
        if mode not in ("replay", "stream"):
            raise ValueError(f"unknown feed mode {mode!r}")
        self.source = str(source)
        self.mode = mode
        self.discarded_partial = 0
        if mode == "replay":
            path = Path(source)
            if not path.is_file():
                raise FileNotFoundError(f"feed file not found: {path}")
            self._fh = path.open("rb")
            self._sock = None
        else:
            host, _, port = self.source.rpartition(":")
            try:
                self._sock = socket.create_connection((host or "127.0.0.1", int(port)), timeout=timeout)
            except (OSError, ValueError) as exc:
                raise ConnectionError(f"cannot connect to feed {self.source}: {exc}") from exc
            self._fh = None

    def __iter__(self) -> Iterator[bytes]:
        if self._fh is not None:
            for line in self._fh:
                if line.endswith(b"\n"):
                    line = line[:-1]
                if line.endswith(b"\r"):
                    line = line[:-1]
                yield line
            return
        buf = b""
        while True:
            try:
                chunk = self._sock.recv(65536)
            except OSError:
                chunk = b""
            if not chunk:
                if buf:
                    self.discarded_partial += 1
                return
            buf += chunk
            *lines, buf = buf.split(b"\n")
            for line in lines:
                yield line.rstrip(b"\r")

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
        if self._sock is not None:
            self._sock.close()

    def __enter__(self) -> Feed:
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def open_feed(source: str | Path, mode: str = "replay") -> Feed:
    return Feed(source, mode)


def read_feed(feed: Feed) -> Iterator[RawTransaction | Rejected]:
    """Decode and parse every line of ``feed``, in order."""
    for line_no, line in enumerate(feed, start=1):
        try:
            text = line.decode("utf-8")
        except UnicodeDecodeError:
            yield Rejected(line_no, "non_utf8", "line is not valid UTF-8")
            continue
        if not text.strip():
            yield Rejected(line_no, "empty_line", "blank line")
            continue
        try:
            yield parse_record(text)
        except RecordError as exc:
            yield Rejected(line_no, exc.reason, str(exc))
