"""Deterministic synthetic corpora: feed, pools, prices, registry, wallets, chains.

The pool universe has two venues over the same token graph and reserves: a
competitor venue charging ``competitor_fee_ppm`` and the baseline venue
charging ``competitor_fee_ppm - advantage_ppm``. Observed swaps are decoded as
competitor trades, so the baseline should win almost every comparison.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from pathlib import Path

from .decoder import abi
from .ingest import IntentFill, Kind, RawTransaction, serialize_record
from .metrics import PriceQuote, PriceSource, write_prices
from .metrics.chains import ETHEREUM
from .pipeline import DEFAULT_BASELINE_ROUTER
from .simulator import Pool, pool_to_json

UNISWAP_V2_ROUTER = "0x7a250d5630b4cf539739df2c5dacb4c659f2488d"
FUSION_SETTLEMENT = "0xa88800cd213da5ae406ce248380802bd53b47647"
COMPETITOR_VENUE = "uniswap_v2"
BASELINE_VENUE = "oneinch"

SEL_EXACT_TOKENS = bytes.fromhex("38ed1739")  # swapExactTokensForTokens
SEL_EXACT_ETH = bytes.fromhex("7ff36ab5")  # swapExactETHForTokens
SEL_FOR_EXACT = bytes.fromhex("8803dbee")  # swapTokensForExactTokens
SEL_UNKNOWN = bytes.fromhex("deadbeef")


@dataclass(frozen=True)
class Token:
    symbol: str
    address: str
    decimals: int
    usd: float


TOKENS = (
    Token("WETH", "0xc02aaa39b223fe8d0a0e5c4f27ead9083c756cc2", 18, 3000.0),
    Token("USDC", "0xa0b86991c6218b36c1d19d4a2e9eb0ce3606eb48", 6, 1.0),
    Token("USDT", "0xdac17f958d2ee523a2206206994597c13d831ec7", 6, 1.0),
    Token("DAI", "0x6b175474e89094c44da98b954eac495271d0f44f", 18, 1.0),
    Token("WBTC", "0x2260fac5e5542a773aa44fbcfedc7c193bc2c599", 8, 60000.0),
)
# Routable but absent from every price table.
UNPRICED = Token("UNP", "0x1000000000000000000000000000000000000001", 18, 2.0)
# Priced only by the fallback source.
SPOT_ONLY = Token("SPOT", "0x2000000000000000000000000000000000000002", 18, 5.0)

PAIRS = (
    ("WETH", "USDC"),
    ("WETH", "USDT"),
    ("WETH", "DAI"),
    ("WETH", "WBTC"),
    ("USDC", "DAI"),
    ("USDC", "USDT"),
    ("WBTC", "USDC"),
)

NOISE_KINDS = ("malformed", "non_swap", "never_mined", "stale", "exact_output", "unpriced", "mixed")

REGISTRY = [
    {
        "contract": UNISWAP_V2_ROUTER,
        "selector": "0x38ed1739",
        "name": "swapExactTokensForTokens",
        "protocol": COMPETITOR_VENUE,
        "params": ["uint256", "uint256", "address[]", "address", "uint256"],
        "semantics": {
            "amount_in": 0,
            "min_out": 1,
            "src_token": "2[0]",
            "dst_token": "2[-1]",
            "recipient": 3,
            "deadline": 4,
        },
    },
    {
        "contract": UNISWAP_V2_ROUTER,
        "selector": "0x7ff36ab5",
        "name": "swapExactETHForTokens",
        "protocol": COMPETITOR_VENUE,
        "params": ["uint256", "address[]", "address", "uint256"],
        "semantics": {
            "amount_in": "tx.value",
            "min_out": 0,
            "src_token": "1[0]",
            "dst_token": "1[-1]",
            "recipient": 2,
            "deadline": 3,
        },
    },
    {
        "contract": UNISWAP_V2_ROUTER,
        "selector": "0x8803dbee",
        "name": "swapTokensForExactTokens",
        "protocol": COMPETITOR_VENUE,
        "params": ["uint256", "uint256", "address[]", "address", "uint256"],
        "semantics": {"amount_in": 1, "src_token": "2[0]", "dst_token": "2[-1]", "recipient": 3, "deadline": 4},
        "exact_output": True,
    },
]

_SWAP_TYPES = [abi.parse_type(t) for t in REGISTRY[0]["params"]]


@dataclass(frozen=True)
class SynthConfig:
    n_swaps: int = 1000
    seed: int = 0
    mode: str = "classic"
    competitor_fee_ppm: int = 3000
    advantage_ppm: int = 3000
    depth_usd: float = 50_000_000.0
    min_usd: float = 1_000.0
    max_usd: float = 200_000.0
    gas_price_wei: int = 20 * 10**9
    gas_limit: int = 300_000
    gas_per_swap: int = 60_000
    swaps_per_block: int = 10
    first_block: int = 18_000_000
    noise: int = 0
    # Intent mode: fill quality relative to the input value, in percent.
    intent_mean_pct: float = -0.05
    intent_sd_pct: float = 0.3


@dataclass(frozen=True)
class FixturePaths:
    root: Path
    feed: Path
    pools: Path
    prices: Path
    registry: Path
    wallets: Path
    chains: Path


def _by_symbol() -> dict[str, Token]:
    return {t.symbol: t for t in (*TOKENS, UNPRICED, SPOT_ONLY)}


def _units(token: Token, usd: float) -> int:
    return int(usd / token.usd * 10**token.decimals)


def build_pools(cfg: SynthConfig) -> list[Pool]:
    toks = _by_symbol()
    pairs = list(PAIRS) + [("WETH", UNPRICED.symbol), ("WETH", SPOT_ONLY.symbol)]
    venues = (
        (COMPETITOR_VENUE, cfg.competitor_fee_ppm),
        (BASELINE_VENUE, cfg.competitor_fee_ppm - cfg.advantage_ppm),
    )
    pools = []
    for venue, fee in venues:
        for a, b in pairs:
            ta, tb = toks[a], toks[b]
            pools.append(
                Pool(
                    id=f"{venue}:{a}-{b}",
                    token0=ta.address,
                    token1=tb.address,
                    reserve0=_units(ta, cfg.depth_usd),
                    reserve1=_units(tb, cfg.depth_usd),
                    fee_ppm=fee,
                    gas_per_swap=cfg.gas_per_swap,
                    venue=venue,
                )
            )
    return pools


def _tx_hash(seed: int, i: int, tag: str = "") -> str:
    return "0x" + hashlib.sha256(f"decs:{seed}:{tag}:{i}".encode()).hexdigest()


def _address(rng: random.Random) -> str:
    return "0x" + "".join(rng.choice("0123456789abcdef") for _ in range(40))


def _swap_calldata(selector: bytes, amount: int, limit: int, path: list[str], to: str, deadline: int) -> bytes:
    return abi.encode_call(selector, _SWAP_TYPES, [amount, limit, path, to, deadline])


def _pick_pair(rng: random.Random) -> tuple[Token, Token]:
    src, dst = rng.sample(TOKENS, 2)
    return src, dst


def _usd_amount(rng: random.Random, cfg: SynthConfig) -> float:
    # Log-uniform trade size.
    lo, hi = cfg.min_usd, cfg.max_usd
    return lo * (hi / lo) ** rng.random()


def _classic_tx(rng: random.Random, cfg: SynthConfig, i: int, block: int, src: Token, dst: Token, **kw) -> RawTransaction:
    usd = _usd_amount(rng, cfg)
    sender = _address(rng)
    selector = kw.pop("selector", SEL_EXACT_TOKENS)
    amount = _units(src, usd)
    # swapTokensForExactTokens carries (amountOut, amountInMax); the cap must be non-zero.
    limit = 2 * amount if selector == SEL_FOR_EXACT else 0
    calldata = _swap_calldata(selector, amount, limit, [src.address, dst.address], sender, 2_000_000_000)
    return RawTransaction(
        chain_id=ETHEREUM,
        tx_hash=_tx_hash(cfg.seed, i, kw.pop("tag", "")),
        sender=sender,
        recipient=UNISWAP_V2_ROUTER,
        value=0,
        gas_price=cfg.gas_price_wei,
        gas_limit=cfg.gas_limit,
        calldata=calldata,
        observed_block=block,
        kind=kw.pop("kind", Kind.MINED),
        mined_block=kw.pop("mined_block", block + rng.randint(0, 4)),
    )


def _intent_tx(rng: random.Random, cfg: SynthConfig, i: int, block: int) -> RawTransaction:
    src, dst = _pick_pair(rng)
    usd = _usd_amount(rng, cfg)
    received = usd * (1 + rng.gauss(cfg.intent_mean_pct, cfg.intent_sd_pct) / 100)
    fill = IntentFill(
        src_token=src.address,
        dst_token=dst.address,
        amount_in=_units(src, usd),
        amount_out=_units(dst, received),
        fill_block=block + rng.randint(0, 4),
        protocol="fusion",
    )
    return RawTransaction(
        chain_id=ETHEREUM,
        tx_hash=_tx_hash(cfg.seed, i, "intent"),
        sender=_address(rng),
        recipient=FUSION_SETTLEMENT,
        value=0,
        gas_price=0,
        gas_limit=cfg.gas_limit,
        calldata=b"",
        observed_block=block,
        kind=Kind.INTENT_ORDER,
        intent_fill=fill,
    )


def _noise_line(rng: random.Random, cfg: SynthConfig, kind: str, i: int, block: int) -> str:
    weth = TOKENS[0]
    usdc = TOKENS[1]
    if kind == "malformed":
        return '{"chain_id": 1, "tx_hash": "0xnot-hex"'
    if kind == "non_swap":
        tx = _classic_tx(rng, cfg, i, block, weth, usdc, tag=kind, selector=SEL_UNKNOWN)
    elif kind == "never_mined":
        tx = _classic_tx(rng, cfg, i, block, weth, usdc, tag=kind, kind=Kind.MEMPOOL, mined_block=None)
    elif kind == "stale":
        tx = _classic_tx(rng, cfg, i, block, weth, usdc, tag=kind, mined_block=block + 5 + rng.randint(0, 5))
    elif kind == "exact_output":
        tx = _classic_tx(rng, cfg, i, block, weth, usdc, tag=kind, selector=SEL_FOR_EXACT)
    elif kind == "unpriced":
        tx = _classic_tx(rng, cfg, i, block, weth, UNPRICED, tag=kind)
    elif kind == "mixed":
        tx = _classic_tx(rng, cfg, i, block, weth, SPOT_ONLY, tag=kind)
    else:
        raise ValueError(f"unknown noise kind {kind!r}")
    return serialize_record(tx)


def feed_lines(cfg: SynthConfig) -> list[str]:
    rng = random.Random(cfg.seed)
    lines = []
    for i in range(cfg.n_swaps):
        block = cfg.first_block + i // cfg.swaps_per_block
        if cfg.mode == "intent":
            tx = _intent_tx(rng, cfg, i, block)
        else:
            src, dst = _pick_pair(rng)
            tx = _classic_tx(rng, cfg, i, block, src, dst)
        lines.append(serialize_record(tx))
    noise = []
    if cfg.mode == "classic":
        for kind in NOISE_KINDS:
            for j in range(cfg.noise):
                block = cfg.first_block + rng.randrange(max(1, cfg.n_swaps // cfg.swaps_per_block))
                noise.append(_noise_line(rng, cfg, kind, j, block))
    for line in noise:
        lines.insert(rng.randrange(len(lines) + 1), line)
    return lines


def blocks_used(cfg: SynthConfig) -> list[int]:
    n_blocks = max(1, -(-cfg.n_swaps // cfg.swaps_per_block))
    return [cfg.first_block + b for b in range(n_blocks)]


def price_quotes(cfg: SynthConfig) -> list[PriceQuote]:
    # The fallback table lacks the native token, so a SPOT_ONLY swap can't be priced from one source.
    block = cfg.first_block - 1
    quotes = [PriceQuote(t.address, t.usd, t.decimals, PriceSource.PRIMARY, block) for t in TOKENS]
    fallback = [t for t in TOKENS if t.symbol != "WETH"] + [SPOT_ONLY]
    quotes += [PriceQuote(t.address, t.usd, t.decimals, PriceSource.SPOT, block) for t in fallback]
    return quotes


def wallets_json(cfg: SynthConfig) -> list[dict]:
    rich = {t.address: hex(10**40) for t in (*TOKENS, UNPRICED, SPOT_ONLY)}
    approvals = sorted([t.address, DEFAULT_BASELINE_ROUTER] for t in (*TOKENS, UNPRICED, SPOT_ONLY))
    return [
        # Richest but unapproved: never eligible.
        {"address": "0x0000000000000000000000000000000000000a00", "native_balance": hex(10**30), "token_balances": rich, "approvals": []},
        {"address": "0x0000000000000000000000000000000000000b00", "native_balance": hex(10**30), "token_balances": rich, "approvals": approvals},
        {"address": "0x0000000000000000000000000000000000000c00", "native_balance": hex(10**30), "token_balances": rich, "approvals": approvals},
    ]


def chains_json() -> list[dict]:
    return [{"chain_id": ETHEREUM, "name": "Ethereum", "max_block_lag": 4, "native_token": TOKENS[0].address}]


def write_fixture(root: str | Path, cfg: SynthConfig | None = None) -> FixturePaths:
    cfg = cfg or SynthConfig()
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    paths = FixturePaths(
        root=root,
        feed=root / "feed.jsonl",
        pools=root / "pools.json",
        prices=root / "prices.csv",
        registry=root / "registry.json",
        wallets=root / "wallets.json",
        chains=root / "chains.json",
    )
    paths.feed.write_text("".join(line + "\n" for line in feed_lines(cfg)))
    pools = [pool_to_json(p) for p in build_pools(cfg)]
    snapshots = [{"block_number": b, "pools": pools} for b in blocks_used(cfg)]
    paths.pools.write_text(json.dumps(snapshots, separators=(",", ":")))
    write_prices(paths.prices, price_quotes(cfg))
    paths.registry.write_text(json.dumps(REGISTRY, indent=2))
    paths.wallets.write_text(json.dumps(wallets_json(cfg), indent=2))
    paths.chains.write_text(json.dumps(chains_json(), indent=2))
    return paths
