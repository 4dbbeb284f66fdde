from __future__ import annotations

import csv
import dataclasses
import json

import pytest

from decs.reporting import (
    RecordStore,
    SchemaVersionMismatch,
    StoreCorrupted,
    decode_line,
    encode_line,
)


@pytest.fixture
def recs(small_run):
    assert len(small_run.records) >= 50
    return small_run.records


def test_append_counts(tmp_path, recs):
    store = RecordStore(tmp_path)
    store.append(recs * 3)
    store.append(recs[:50])
    n = 3 * len(recs) + 50
    assert store.count == n
    reopened = RecordStore(tmp_path)
    assert reopened.count == n and sum(1 for _ in reopened.records()) == n
    m = json.loads((tmp_path / "manifest.json").read_text())
    assert m["first_block"] == min(r.sim_block for r in recs)
    assert m["last_block"] == max(r.sim_block for r in recs)


def test_round_trip(tmp_path, recs):
    store = RecordStore(tmp_path)
    store.append(recs)
    assert list(store.records()) == recs


def test_line_checksum(recs):
    line = encode_line(recs[0])
    assert decode_line(line) == recs[0]
    assert decode_line(line[:-1]) is None
    assert decode_line(line.replace(b'"winner":"', b'"winner":"x')) is None


def test_torn_tail_recovered(tmp_path, recs):
    store = RecordStore(tmp_path)
    store.append(recs[:10])
    with (tmp_path / "records.jsonl").open("ab") as fh:
        fh.write(encode_line(recs[10])[:37])
    reopened = RecordStore(tmp_path)
    assert reopened.recovered_bytes == 37
    assert reopened.count == 10 and len(list(reopened.records())) == 10
    reopened.append(recs[10:12])
    assert len(list(RecordStore(tmp_path).records())) == 12


def test_uncommitted_full_line_dropped(tmp_path, recs):
    store = RecordStore(tmp_path)
    store.append(recs[:3])
    with (tmp_path / "records.jsonl").open("ab") as fh:
        fh.write(encode_line(recs[3]))
    assert RecordStore(tmp_path).count == 3


def test_committed_region_damage(tmp_path, recs):
    RecordStore(tmp_path).append(recs[:3])
    p = tmp_path / "records.jsonl"
    p.write_bytes(p.read_bytes()[:-10])
    with pytest.raises(StoreCorrupted):
        RecordStore(tmp_path)


def test_schema_mismatch(tmp_path, recs):
    store = RecordStore(tmp_path)
    bad = dataclasses.replace(recs[0], schema_version=recs[0].schema_version + 1)
    with pytest.raises(SchemaVersionMismatch):
        store.append([recs[1], bad])
    assert store.count == 0


def test_csv_export(tmp_path, recs):
    store = RecordStore(tmp_path)
    store.append(recs)
    path = store.export_csv()
    rows = list(csv.DictReader(path.open()))
    assert len(rows) == len(recs)
    assert rows[0]["tx_hash"] == recs[0].tx_hash
    assert int(rows[0]["outgoing_actual_out"]) == recs[0].outgoing.actual_out
