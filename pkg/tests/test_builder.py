from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from decs.builder import ExactOutputUnsupported, ExhaustiveRouter, NoRoute, build_equivalent, find_route
from decs.decoder import SwapIntent
from decs.ingest import Kind, RawTransaction
from decs.simulator import Pool, PoolSet
from decs.wallets import Wallet

TOK = ["0x" + f"{i:02x}" * 20 for i in range(1, 6)]
A, W, B, Z = TOK[0], TOK[1], TOK[2], TOK[4]


def p(pid, t0, t1, r0=10**6, r1=10**6, fee=3000, venue=""):
    return Pool(pid, t0, t1, r0, r1, fee, 50000, venue)


def incoming(gas_price=30 * 10**9, gas_limit=250000, block=10) -> RawTransaction:
    return RawTransaction(1, "0x" + "02" * 32, "0x" + "aa" * 20, "0x" + "bb" * 20, 0, gas_price, gas_limit, b"", block, Kind.MINED, block)


def intent(src=A, dst=B, amount=1000, exact=False):
    return SwapIntent(src, dst, amount, "0x02", "v2", exact)


def test_gas_fields_copied():
    ps = PoolSet([p("ab", A, B)], 10)
    req = build_equivalent(intent(), Wallet("0x01", 0), incoming(), ExhaustiveRouter(), ps, "0x" + "11" * 20)
    assert (req.gas_price, req.gas_limit, req.sim_block) == (30 * 10**9, 250000, 10)
    assert req.intent == intent()


def test_degenerate_pair():
    with pytest.raises(NoRoute):
        find_route(A, A, 10, PoolSet([p("ab", A, B)], 1))


def test_exact_output_refused():
    with pytest.raises(ExactOutputUnsupported):
        build_equivalent(intent(exact=True), None, incoming(), ExhaustiveRouter(), PoolSet([p("ab", A, B)], 10), "0x")


def test_two_hop_only_path():
    r = find_route(A, B, 1000, PoolSet([p("aw", A, W), p("wb", W, B)], 1))
    assert r.hops == ("aw", "wb") and r.token_path == (A, W, B)


def test_direct_beats_two_hop():
    ps = PoolSet([p("ab", A, B), p("aw", A, W), p("wb", W, B)], 1)
    assert find_route(A, B, 1000, ps).hops == ("ab",)


def test_tie_prefers_fewer_hops():
    two_hop = [p("aw", A, W), p("wb", W, B)]
    x = find_route(A, B, 1000, PoolSet(two_hop, 1))
    out = cpmm(10**6, 10**6, cpmm(10**6, 10**6, 1000, 3000), 3000)
    assert x.hops == ("aw", "wb")
    # Direct pool built so its output equals the two-hop output; "zz" sorts last.
    direct = p("zz", A, B, 1000, 2 * out, fee=0)
    assert cpmm(1000, 2 * out, 1000, 0) == out
    assert find_route(A, B, 1000, PoolSet(two_hop + [direct], 1)).hops == ("zz",)


def test_tie_then_lexicographic():
    ps = PoolSet([p("q", A, B), p("b", A, B)], 1)
    assert find_route(A, B, 1000, ps).hops == ("b",)


def test_isolated_token():
    with pytest.raises(NoRoute):
        find_route(A, Z, 10, PoolSet([p("ab", A, B)], 1))


def test_hop_cap():
    chain = PoolSet([p(f"h{i}", TOK[i], TOK[i + 1]) for i in range(4)], 1)
    with pytest.raises(NoRoute):
        find_route(TOK[0], TOK[4], 1000, chain, max_hops=3)
    assert len(find_route(TOK[0], TOK[4], 1000, chain, max_hops=4).hops) == 4


def test_venue_restriction():
    ps = PoolSet([p("a", A, B, fee=0, venue="x"), p("b", A, B, fee=5000, venue="y")], 1)
    assert ExhaustiveRouter({"y"}).find(A, B, 1000, ps).hops == ("b",)
    assert ExhaustiveRouter().find(A, B, 1000, ps).hops == ("a",)


def cpmm(r_in, r_out, amt, fee):
    eff = amt * (10**6 - fee) // 10**6
    return r_out * eff // (r_in + eff)


def oracle(pools, src, dst, amount, max_hops=3):
    """Enumerate every pool sequence, keep simple token paths ending at dst."""
    best = None
    for k in range(1, max_hops + 1):
        for seq in itertools.permutations(pools, k):
            tok, path, amt, state = src, [src], amount, {}
            ok = True
            for pl in seq:
                if tok not in (pl.token0, pl.token1):
                    ok = False
                    break
                r0, r1 = state.get(pl.id, (pl.reserve0, pl.reserve1))
                if tok == pl.token0:
                    out = cpmm(r0, r1, amt, pl.fee_ppm)
                    state[pl.id] = (r0 + amt, r1 - out)
                    tok = pl.token1
                else:
                    out = cpmm(r1, r0, amt, pl.fee_ppm)
                    state[pl.id] = (r0 - out, r1 + amt)
                    tok = pl.token0
                if out == 0 or tok in path:
                    ok = False
                    break
                path.append(tok)
                amt = out
            if ok and tok == dst:
                key = (-amt, k, tuple(pl.id for pl in seq))
                best = key if best is None or key < best else best
    return best


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32))
def test_optimal_against_enumeration(seed):
    rng = random.Random(seed)
    tokens = TOK[: rng.randint(3, 5)]
    pools = []
    for i in range(rng.randint(1, 8)):
        t0, t1 = rng.sample(tokens, 2)
        pools.append(p(f"p{i}", t0, t1, rng.randint(10**3, 10**9), rng.randint(10**3, 10**9), rng.choice([0, 500, 3000, 10000])))
    src, dst = rng.sample(tokens, 2)
    amount = rng.randint(1, 10**7)
    expected = oracle(pools, src, dst, amount)
    if expected is None:
        with pytest.raises(NoRoute):
            find_route(src, dst, amount, PoolSet(pools, 1))
        return
    r = find_route(src, dst, amount, PoolSet(pools, 1))
    assert r.hops == expected[2]
