from __future__ import annotations

import csv
import dataclasses
import io
import json
import statistics

import pytest

from decs.metrics import Mode, Winner, assign_bucket
from decs.reporting import EmptyScope, RecordStore, Scope, build_bucket_table, build_mart, fmt_pct, fmt_usd, mart_csv
from decs.reporting.mart import bucket_csv
from decs.errors import InputFormatError


@pytest.fixture
def proto(small_run):
    return small_run.records[0]


def make(proto, uplift_usd, winner, v_in=1000.0, **over):
    return dataclasses.replace(
        proto, uplift_usd=uplift_usd, winner=winner, v_in_usd=v_in, uplift_pct=100 * uplift_usd / v_in,
        bucket=assign_bucket(v_in, proto.bucket_scheme), **over
    )


def q(values, p):
    return statistics.quantiles(values, n=100, method="inclusive")[p - 1] if len(values) > 1 else values[0]


def test_all_draw(proto):
    recs = [make(proto, 0.5, Winner.DRAW) for _ in range(7)]
    t = build_mart(recs)
    assert t.row("Parity").pct_won == 100.0
    assert t.row("1inch").comparisons == 0 and t.row("1inch").mean is None
    assert t.footer.win_loss_ratio is None and t.footer.win_loss_display == "undefined"


def test_hand_computed(proto):
    ups = [12.0, 3.5, -4.0, 0.2, 7.0, 25.0, -0.5, 1.1, 9.9, -12.0, 0.0, 4.4, 2.2, 30.0, -1.0, 0.7, 16.0, 5.5, -8.0, 0.3]
    eps = 1.0
    winners = [Winner.ONEINCH if u > eps else Winner.COMPETITOR if u < -eps else Winner.DRAW for u in ups]
    recs = [make(proto, u, w, v_in=1000.0 + i) for i, (u, w) in enumerate(zip(ups, winners))]
    t = build_mart(recs)
    for label, want in (("TOTAL", None), ("1inch", Winner.ONEINCH), ("Parity", Winner.DRAW), ("Competitors", Winner.COMPETITOR)):
        sub = [u for u, w in zip(ups, winners) if want is None or w is want]
        row = t.row(label)
        assert row.comparisons == len(sub)
        assert row.mean == pytest.approx(statistics.fmean(sub))
        assert row.median == pytest.approx(statistics.median(sub))
        assert row.p05 == pytest.approx(q(sub, 5)) and row.p95 == pytest.approx(q(sub, 95))
        if want is not None:
            assert row.pct_won == pytest.approx(100 * len(sub) / 20)
    vol = sum(1000.0 + i for i in range(20))
    assert t.footer.total_volume_usd == pytest.approx(vol)
    assert t.footer.total_uplift_usd == pytest.approx(sum(ups))
    assert t.footer.total_uplift_pct == pytest.approx(100 * sum(ups) / vol)
    wins, losses = winners.count(Winner.ONEINCH), winners.count(Winner.COMPETITOR)
    assert t.footer.win_loss_ratio == pytest.approx(wins / losses)
    assert t.footer.win_loss_display == f"{int(wins / losses + 0.5)}x"


def test_conservation(small_run):
    t = build_mart(small_run.records)
    parts = [t.row(k).comparisons for k in ("1inch", "Parity", "Competitors")]
    assert sum(parts) == t.row("TOTAL").comparisons == len(small_run.records)
    assert sum(t.row(k).pct_won for k in ("1inch", "Parity", "Competitors")) == pytest.approx(100)


def test_empty_scope(small_run):
    with pytest.raises(EmptyScope):
        build_mart(small_run.records, Scope(chains=(56,)))
    with pytest.raises(EmptyScope):
        build_mart([])


def test_scope_filters(proto):
    recs = [
        make(proto, 2.0, Winner.ONEINCH, competitor="a", sim_block=10),
        make(proto, 2.0, Winner.ONEINCH, competitor="b", sim_block=20),
        make(proto, 2.0, Winner.ONEINCH, v_in=50_000.0, competitor="a", sim_block=30),
    ]
    assert build_mart(recs, Scope(competitors=("a",))).row("TOTAL").comparisons == 2
    assert build_mart(recs, Scope(block_range=(15, 30))).row("TOTAL").comparisons == 2
    assert build_mart(recs, Scope(bucket_scheme="classic3", bucket="$10k–100k")).row("TOTAL").comparisons == 1
    assert build_mart(recs, Scope(mode=Mode.CLASSIC)).row("TOTAL").comparisons == 3


def test_scope_json(tmp_path):
    s = Scope(chains=(1,), mode=Mode.INTENT, bucket_scheme="intent7", bucket="<$1k")
    p = tmp_path / "s.json"
    p.write_text(json.dumps(s.to_json()))
    assert Scope.load(p) == s
    with pytest.raises(InputFormatError):
        Scope.from_json({"chain": [1]})
    with pytest.raises(InputFormatError):
        Scope(bucket="<$1k")


def test_rebuild_bit_identical(tmp_path, small_run):
    store = RecordStore(tmp_path)
    store.append(small_run.records)
    a = mart_csv(build_mart(store))
    b = mart_csv(build_mart(RecordStore(tmp_path)))
    assert a == b
    assert json.dumps(build_mart(store).to_json(), sort_keys=True) == json.dumps(build_mart(store).to_json(), sort_keys=True)


def test_csv_layout(small_run):
    rows = list(csv.reader(io.StringIO(mart_csv(build_mart(small_run.records)))))
    assert rows[0] == ["Winner", "Comparisons", "% won", "p05", "Median", "Mean", "p95"]
    assert [r[0] for r in rows[1:5]] == ["TOTAL", "1inch", "Parity", "Competitors"]
    assert rows[1][2] == "-"
    assert rows[5][0] == "Total volume of analysed transactions"
    assert rows[7][0] == "Times 1inch is better than nearest competitor"


@pytest.mark.parametrize("x, s", [(1234.567, "$1,234.57"), (-0.5, "-$0.50"), (None, "-"), (0.0, "$0.00")])
def test_fmt_usd(x, s):
    assert fmt_usd(x) == s


def test_fmt_pct():
    assert fmt_pct(0.1234) == "0.12%" and fmt_pct(None) == "N/A"


def test_bucket_table(small_run):
    rows = build_bucket_table(small_run.records, Scope(), "fine9", min_n=5)
    assert rows[-1].n == len(small_run.records)
    assert sum(r.n for r in rows[:-1]) == rows[-1].n
    text = bucket_csv(rows)
    assert text.splitlines()[0].startswith("Bucket,n,p05")
