from __future__ import annotations

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from decs.decoder import SwapIntent
from decs.metrics import (
    ARBITRUM,
    BSC,
    BUCKET_SCHEMES,
    ETHEREUM,
    POLYGON,
    Candidate,
    ChainConfig,
    ComparisonRecord,
    MissingPrice,
    MixedPriceSources,
    Mode,
    NoLosses,
    PriceBook,
    PriceQuote,
    PriceSource,
    RevertedInput,
    Winner,
    ZeroVolume,
    apply_filters,
    assign_bucket,
    attach_prices,
    bucket_labels,
    check_freshness,
    default_chains,
    determine_winner,
    effective_amount,
    load_chains,
    load_prices,
    parity_threshold,
    render_ratio,
    score,
    summarize_drops,
    uplift,
    win_share,
    winrate,
    write_prices,
)
from decs.simulator import ExecutionResult

USDC, WETH, DAI = "0x" + "a0" * 20, "0x" + "c0" * 20, "0x" + "6b" * 20
GWEI = 10**9


def usdc(price=1.0, source=PriceSource.PRIMARY, block=0):
    return PriceQuote(USDC, price, 6, source, block)


def weth(price=3000.0, source=PriceSource.PRIMARY, block=0):
    return PriceQuote(WETH, price, 18, source, block)


# ------------------------------------------------------------ effective amount


def test_worked_example():
    res = ExecutionResult(0, 2000 * 10**6, 120_000)
    a = effective_amount(res, usdc(), gas_price=25 * GWEI, p_native=weth())
    assert abs(a - 1991.0) <= 1e-9


def test_intent_mode_has_no_gas():
    res = ExecutionResult(0, 2000 * 10**6, 120_000)
    assert effective_amount(res, usdc(), gas_price=25 * GWEI, p_native=weth(), mode=Mode.INTENT) == 2000.0
    assert effective_amount(res, usdc(), gas_price=0, p_native=None, mode="intent") == 2000.0


def test_zero_gas_identity():
    res = ExecutionResult(0, 1234 * 10**6, 0)
    assert effective_amount(res, usdc(), gas_price=25 * GWEI, p_native=weth()) == usdc().to_usd(1234 * 10**6)


def test_reverted_input():
    with pytest.raises(RevertedInput):
        effective_amount(ExecutionResult(1, 0, 0, True), usdc(), gas_price=1, p_native=weth())


# ------------------------------------------------------------ parity threshold and winner


@pytest.mark.parametrize(
    "v, eps",
    [(0, 1), (5_000, 1), (9_999.999, 1), (10_000, 5), (99_999, 5), (100_000, 10), (499_999.99, 10), (500_000, 50), (600_000, 50)],
)
def test_parity_tiers(v, eps):
    assert parity_threshold(v) == eps


@given(st.floats(0, 1e9), st.floats(0, 1e9))
def test_threshold_monotone(a, b):
    lo, hi = sorted((a, b))
    assert parity_threshold(lo) <= parity_threshold(hi)


@pytest.mark.parametrize("a_in, a_out, w", [(1000, 1002, Winner.ONEINCH), (1000, 1000.5, Winner.DRAW), (1000, 997, Winner.COMPETITOR)])
def test_winner_examples(a_in, a_out, w):
    assert determine_winner(a_in, a_out, 1) is w


def test_winner_boundaries_are_draws():
    assert determine_winner(0.0, 5.0, 5.0) is Winner.DRAW
    assert determine_winner(5.0, 0.0, 5.0) is Winner.DRAW


@given(st.floats(-1e7, 1e7), st.floats(-1e7, 1e7), st.sampled_from([0.0, 1.0, 5.0, 10.0, 50.0]))
def test_winner_sign_convention(a_in, a_out, eps):
    w = determine_winner(a_in, a_out, eps)
    up, _ = uplift(a_in, a_out, 1.0)
    assert (up > eps) == (w is Winner.ONEINCH)


def test_negative_epsilon():
    with pytest.raises(ValueError):
        determine_winner(0, 0, -1)


# ------------------------------------------------------------ uplift and win/loss ratio


def test_uplift_example():
    usd, pct = uplift(1000, 1010, 1000)
    assert usd == 10 and pct == pytest.approx(1.0)


def test_uplift_identity():
    assert uplift(1000, 1000, 10) == (0, 0)


def test_zero_volume():
    with pytest.raises(ZeroVolume):
        uplift(1, 2, 0)


def test_winrate_anchor():
    winners = [Winner.ONEINCH] * 378_547 + [Winner.COMPETITOR] * 14_128 + [Winner.DRAW] * 10
    r = winrate(winners)
    assert abs(r - 26.79) <= 0.01
    assert render_ratio(r) == "27x"


def test_winrate_zero_wins():
    assert winrate([Winner.COMPETITOR] * 5) == 0


def test_no_losses():
    with pytest.raises(NoLosses):
        winrate([Winner.ONEINCH, Winner.DRAW])
    assert render_ratio(None) == "undefined"


@pytest.mark.parametrize("r, s", [(0.49, "0x"), (0.5, "1x"), (26.5, "27x"), (2.4999, "2x")])
def test_render_ratio(r, s):
    assert render_ratio(r) == s


def test_win_share():
    assert win_share(["oneinch", "draw", "competitor", "oneinch"]) == 0.5


# ------------------------------------------------------------ buckets


@pytest.mark.parametrize(
    "v, scheme, label",
    [
        (10_000, "classic3", "$10k–100k"),
        (9_999.99, "classic3", "<$10k"),
        (100_000, "classic3", ">$100k"),
        (999.99, "intent7", "<$1k"),
        (1_000_000, "intent7", ">$1m"),
        (500_000, "fine9", ">$500k"),
        (99.99, "fine9", "<$100"),
        (0, "fine9", "<$100"),
    ],
)
def test_bucket_edges(v, scheme, label):
    assert assign_bucket(v, scheme) == label


def test_bucket_label_counts():
    assert [len(bucket_labels(s)) for s in ("classic3", "intent7", "fine9")] == [3, 7, 9]


@given(st.floats(0, 1e12, allow_nan=False), st.sampled_from(sorted(BUCKET_SCHEMES)))
def test_bucket_totality(v, scheme):
    hits = [label for label in bucket_labels(scheme) if assign_bucket(v, scheme) == label]
    assert len(hits) == 1


# ------------------------------------------------------------ freshness


SHIPPED_LAGS = {ETHEREUM: 4, BSC: 16, ARBITRUM: 192, POLYGON: 24}


def test_shipped_lags():
    assert {c: cfg.max_block_lag for c, cfg in default_chains().items()} == SHIPPED_LAGS


@pytest.mark.parametrize("chain, lag", sorted(SHIPPED_LAGS.items()))
def test_freshness_flips_at_lag(chain, lag):
    cfg = default_chains()[chain]
    assert check_freshness(1000 + lag, 1000, cfg)
    assert not check_freshness(1000 + lag + 1, 1000, cfg)
    assert check_freshness(1000, 1000, cfg)
    assert not check_freshness(999, 1000, cfg)


def test_chain_override(tmp_path):
    p = tmp_path / "c.json"
    p.write_text('[{"chain_id": 1, "max_block_lag": 9, "native_token": "0xAB"}]')
    chains = load_chains(p)
    assert chains[1].max_block_lag == 9 and chains[1].native_token == "0xab"
    assert chains[BSC].max_block_lag == 16


# ------------------------------------------------------------ prices


def test_price_book_latest_before_block():
    book = PriceBook([usdc(1.0, block=10), usdc(1.01, block=20)])
    assert book.quote(USDC, 15, PriceSource.PRIMARY).usd_price == 1.0
    assert book.quote(USDC, 20, PriceSource.PRIMARY).usd_price == 1.01
    assert book.quote(USDC, 9, PriceSource.PRIMARY) is None


def test_consistent_prefers_primary():
    book = PriceBook([usdc(), weth(), usdc(0.99, PriceSource.SPOT), weth(2990.0, PriceSource.SPOT)])
    src, q = book.consistent_quotes([USDC, WETH], 5)
    assert src is PriceSource.PRIMARY and q[WETH].usd_price == 3000.0


def test_fallback_when_primary_incomplete():
    book = PriceBook([usdc(), usdc(0.99, PriceSource.SPOT), weth(2990.0, PriceSource.SPOT)])
    src, q = book.consistent_quotes([USDC, WETH], 5)
    assert src is PriceSource.SPOT and q[USDC].usd_price == 0.99


def test_missing_and_mixed():
    book = PriceBook([usdc(), weth(source=PriceSource.SPOT)])
    with pytest.raises(MixedPriceSources):
        book.consistent_quotes([USDC, WETH], 5)
    with pytest.raises(MissingPrice):
        book.consistent_quotes([USDC, DAI], 5)


def test_price_csv_round_trip(tmp_path):
    p = tmp_path / "p.csv"
    quotes = [usdc(1.0001, block=3), weth(3123.45, PriceSource.SPOT, 4)]
    write_prices(p, quotes)
    book = load_prices(p)
    assert book.quote(USDC, 3, PriceSource.PRIMARY) == quotes[0]
    assert book.quote(WETH, 9, PriceSource.SPOT) == quotes[1]


def test_price_csv_without_decimals(tmp_path):
    p = tmp_path / "p.csv"
    p.write_text(f"token,block,usd_price,source\n{WETH},1,3000,primary_engine\n")
    assert load_prices(p).quote(WETH, 1, PriceSource.PRIMARY).decimals == 18


@pytest.mark.parametrize("bad", [dict(usd_price=0.0), dict(decimals=37)])
def test_quote_invariants(bad):
    args = dict(token=USDC, usd_price=1.0, decimals=6, source=PriceSource.PRIMARY, block=0) | bad
    with pytest.raises(ValueError):
        PriceQuote(**args)


# ------------------------------------------------------------ filters and scoring

CFG = {1: ChainConfig(1, 4, WETH)}
BOOK = PriceBook([usdc(), weth(), PriceQuote(DAI, 1.0, 18, PriceSource.SPOT, 0)])


def cand(**over) -> Candidate:
    base = dict(
        tx_hash="0x" + "01" * 32,
        chain_id=1,
        mode=Mode.CLASSIC,
        competitor="v2",
        intent=SwapIntent(WETH, USDC, 10**18, "0x01", "v2"),
        sim_block=100,
        mined_block=102,
        incoming_gas_price=25 * GWEI,
        outgoing_gas_price=25 * GWEI,
        incoming=ExecutionResult(10**18, 2990 * 10**6, 120_000),
        outgoing=ExecutionResult(10**18, 2995 * 10**6, 120_000),
    )
    base.update(over)
    return attach_prices(Candidate(**base), BOOK, WETH)


@pytest.mark.parametrize(
    "over, reason",
    [
        (dict(mined_block=None), "never_mined"),
        (dict(intent=SwapIntent(WETH, USDC, 1, "0x01", "v2", True)), "exact_output"),
        (dict(incoming=ExecutionResult(1, 0, 0, True)), "reverted"),
        (dict(outgoing=None), "reverted"),
        (dict(mined_block=105), "stale_block"),
        (dict(intent=SwapIntent(WETH, "0x" + "99" * 20, 1, "0x01", "v2")), "missing_price"),
        (dict(intent=SwapIntent(WETH, DAI, 1, "0x01", "v2")), "mixed_price_sources"),
    ],
)
def test_drop_reasons(over, reason):
    kept, dropped = apply_filters([cand(**over)], CFG)
    assert kept == [] and [r for _, r in dropped] == [reason]


def test_filters_partition():
    cands = [cand(), cand(mined_block=None), cand(mined_block=110), cand()]
    kept, dropped = apply_filters(cands, CFG)
    assert len(kept) + len(dropped) == len(cands)
    assert summarize_drops(dropped) == {"never_mined": 1, "stale_block": 1}


def test_score_classic():
    rec = score(cand(), "classic3")
    gas_usd = 120_000 * 25 * GWEI / 1e18 * 3000
    assert rec.v_in_usd == 3000.0
    assert rec.a_eff_in == pytest.approx(2990 - gas_usd)
    assert rec.a_eff_out == pytest.approx(2995 - gas_usd)
    assert rec.uplift_usd == rec.a_eff_out - rec.a_eff_in
    assert rec.uplift_pct == pytest.approx(100 * 5 / 3000)
    assert rec.epsilon_usd == 1 and rec.winner is Winner.ONEINCH
    assert rec.bucket == "<$10k"
    assert determine_winner(rec.a_eff_in, rec.a_eff_out, rec.epsilon_usd) is rec.winner


def test_score_intent_incoming_has_no_gas():
    rec = score(cand(mode=Mode.INTENT, incoming=ExecutionResult(10**18, 2990 * 10**6, 0), incoming_gas_price=0), "intent7")
    assert rec.a_eff_in == 2990.0
    assert rec.a_eff_out < 2995.0


def test_record_json_round_trip():
    rec = score(cand(), "classic3")
    assert ComparisonRecord.from_json(rec.to_json()) == rec
    assert not math.isnan(rec.uplift_pct)
    row = rec.csv_row()
    assert row["incoming_actual_out"] == str(2990 * 10**6)
