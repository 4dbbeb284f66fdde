from __future__ import annotations

import json
from collections import Counter

import pytest

from conftest import load_inputs, run_fixture
from decs.errors import InputFormatError
from decs.ingest import read_feed
from decs.metrics import Mode, Winner
from decs.pipeline import STAGE_REASONS, Pipeline, RunConfig, write_outputs
from decs.synthetic import NOISE_KINDS, SynthConfig, write_fixture

GWEI = 10**9
FILTER_REASONS = {"never_mined", "exact_output", "reverted", "stale_block", "missing_price", "mixed_price_sources"}


def test_partition(small_run):
    s = small_run.summary()
    assert s["input_lines"] == 60 + 2 * len(NOISE_KINDS)
    assert s["kept"] + s["dropped"] == s["input_lines"]
    assert s["kept"] == 60


def test_noise_reasons(small_run):
    reasons = set(small_run.drops)
    assert all(v == 2 for v in small_run.drops.values())
    assert reasons <= FILTER_REASONS | set(STAGE_REASONS) | {r for r in reasons if r.startswith("rejected:")}
    assert any(r.startswith("rejected:") for r in reasons)
    assert {"never_mined", "stale_block", "exact_output", "missing_price", "mixed_price_sources", "non_swap"} <= reasons


def test_winner_partition(small_run):
    counts = Counter(r.winner for r in small_run.records)
    assert sum(counts.values()) == small_run.kept
    assert counts[Winner.ONEINCH] == small_run.kept


def test_gas_context_copied(small_run):
    for r in small_run.records:
        assert r.incoming_gas_price == r.outgoing_gas_price
        assert 0 <= r.mined_block - r.sim_block <= 4


def test_determinism(small_fixture, tmp_path):
    a = run_fixture(small_fixture)
    b = run_fixture(small_fixture)
    write_outputs(a, tmp_path / "a")
    write_outputs(b, tmp_path / "b")
    for name in ("records.jsonl", "manifest.json", "records.csv", "drops.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_mode_mismatch(small_fixture):
    res = run_fixture(small_fixture, RunConfig(mode=Mode.INTENT, intent_gas_price=20 * GWEI))
    assert res.kept == 0 and res.drops["mode_mismatch"] > 0


def test_intent_needs_gas_preset():
    with pytest.raises(InputFormatError):
        RunConfig(mode=Mode.INTENT)


@pytest.fixture(scope="module")
def intent_fixture(tmp_path_factory):
    return write_fixture(tmp_path_factory.mktemp("intent"), SynthConfig(n_swaps=80, seed=3, mode="intent"))


def test_intent_run(intent_fixture):
    res = run_fixture(intent_fixture, RunConfig(mode=Mode.INTENT, intent_gas_price=5 * GWEI))
    assert res.kept == 80 and res.input_lines == 80
    for r in res.records:
        assert r.incoming.gas_used == 0 and r.incoming_gas_price == 0
        assert r.outgoing_gas_price == 5 * GWEI
        assert r.mode is Mode.INTENT and r.bucket_scheme == "intent7"
        assert r.a_eff_in == pytest.approx(r.incoming.actual_out / 10 ** _dst_decimals(r) * _dst_price(r), rel=1e-12)


def _dst_decimals(r):
    from decs.synthetic import TOKENS

    return next(t.decimals for t in TOKENS if t.address == r.dst_token)


def _dst_price(r):
    from decs.synthetic import TOKENS

    return next(t.usd for t in TOKENS if t.address == r.dst_token)


def test_unknown_chain(small_fixture):
    inputs = load_inputs(small_fixture)
    inputs.chains = {}
    with small_fixture.feed.open("rb") as fh:
        res = Pipeline(inputs, RunConfig()).run(read_feed(fh))
    assert res.kept == 0 and res.drops["unknown_chain"] > 0


def test_no_snapshot(small_fixture):
    inputs = load_inputs(small_fixture)
    inputs.pools = {}
    with small_fixture.feed.open("rb") as fh:
        res = Pipeline(inputs, RunConfig()).run(read_feed(fh))
    assert res.kept == 0 and res.drops["no_snapshot"] > 0
    assert res.kept + sum(res.drops.values()) == res.input_lines


def test_drops_json(small_run, tmp_path):
    write_outputs(small_run, tmp_path)
    doc = json.loads((tmp_path / "drops.json").read_text())
    assert doc == small_run.summary()
