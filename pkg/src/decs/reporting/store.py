"""Append-only JSONL record store with a sidecar manifest.

Layout of a store directory::

    records.jsonl   one ComparisonRecord per line, each carrying a CRC32
    manifest.json   {schema_version, count, bytes, first_block, last_block}

The manifest is the commit point: it is replaced atomically after the
appended lines are synced. On open, anything past the committed byte length
(a torn or uncommitted tail) is truncated away.
"""

from __future__ import annotations

import csv
import json
import os
import zlib
from collections.abc import Iterable, Iterator
from pathlib import Path

from ..errors import DecsError
from ..metrics import CSV_COLUMNS, SCHEMA_VERSION, ComparisonRecord

RECORDS = "records.jsonl"
MANIFEST = "manifest.json"


class StoreError(DecsError):
    reason = "store_error"


class SchemaVersionMismatch(StoreError):
    reason = "SchemaVersionMismatch"


class StoreCorrupted(StoreError):
    reason = "StoreCorrupted"


def _canonical(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)


def encode_line(record: ComparisonRecord) -> bytes:
    body = record.to_json()
    crc = zlib.crc32(_canonical(body).encode())
    return (_canonical({**body, "_crc": f"{crc:08x}"}) + "\n").encode()


def decode_line(line: bytes) -> ComparisonRecord | None:
    """Parse one stored line; None if it is torn or fails its checksum."""
    if not line.endswith(b"\n"):
        return None
    try:
        obj = json.loads(line)
        crc = obj.pop("_crc")
    except (ValueError, KeyError, AttributeError):
        return None
    if f"{zlib.crc32(_canonical(obj).encode()):08x}" != crc:
        return None
    return ComparisonRecord.from_json(obj)


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    with tmp.open("w") as fh:
        fh.write(text)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


class RecordStore:
    def __init__(self, root: str | Path, schema_version: int = SCHEMA_VERSION) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.records_path = self.root / RECORDS
        self.manifest_path = self.root / MANIFEST
        if self.manifest_path.exists():
            self.manifest = json.loads(self.manifest_path.read_text())
            self.recovered_bytes = self._recover()
        else:
            self.manifest = {
                "schema_version": schema_version,
                "count": 0,
                "bytes": 0,
                "first_block": None,
                "last_block": None,
            }
            self.records_path.write_bytes(b"")
            _write_atomic(self.manifest_path, _canonical(self.manifest) + "\n")
            self.recovered_bytes = 0

    @property
    def schema_version(self) -> int:
        return self.manifest["schema_version"]

    @property
    def count(self) -> int:
        return self.manifest["count"]

    def _recover(self) -> int:
        """Truncate anything beyond the committed manifest; return bytes removed."""
        committed_bytes = self.manifest["bytes"]
        size = self.records_path.stat().st_size if self.records_path.exists() else 0
        if size < committed_bytes:
            raise StoreCorrupted(f"{self.records_path}: {size} bytes on disk, {committed_bytes} committed")
        with self.records_path.open("rb") as fh:
            head = fh.read(committed_bytes)
        lines = head.splitlines(keepends=True)
        if len(lines) != self.manifest["count"] or any(decode_line(ln) is None for ln in lines):
            raise StoreCorrupted(f"{self.records_path}: committed region fails validation")
        if size > committed_bytes:
            with self.records_path.open("r+b") as fh:
                fh.truncate(committed_bytes)
                fh.flush()
                os.fsync(fh.fileno())
        return size - committed_bytes

    def append(self, records: Iterable[ComparisonRecord]) -> dict:
        records = list(records)
        for r in records:
            if r.schema_version != self.schema_version:
                raise SchemaVersionMismatch(
                    f"store holds schema v{self.schema_version}, record {r.tx_hash} is v{r.schema_version}"
                )
        if not records:
            return dict(self.manifest)
        payload = b"".join(encode_line(r) for r in records)
        with self.records_path.open("ab") as fh:
            fh.write(payload)
            fh.flush()
            os.fsync(fh.fileno())
        blocks = [r.sim_block for r in records]
        m = dict(self.manifest)
        m["count"] += len(records)
        m["bytes"] += len(payload)
        m["first_block"] = min(blocks) if m["first_block"] is None else min(m["first_block"], *blocks)
        m["last_block"] = max(blocks) if m["last_block"] is None else max(m["last_block"], *blocks)
        _write_atomic(self.manifest_path, _canonical(m) + "\n")
        self.manifest = m
        return dict(m)

    def records(self) -> Iterator[ComparisonRecord]:
        with self.records_path.open("rb") as fh:
            for line in fh:
                rec = decode_line(line)
                if rec is None:
                    raise StoreCorrupted(f"{self.records_path}: bad line")
                yield rec

    def export_csv(self, path: str | Path | None = None) -> Path:
        path = Path(path) if path is not None else self.root / "records.csv"
        with path.open("w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
            w.writeheader()
            for r in self.records():
                w.writerow(r.csv_row())
        return path


def append_records(store: RecordStore, records: Iterable[ComparisonRecord]) -> dict:
    return store.append(records)
