"""Command-line entry point: ``decs {decode,run,report,stats,synth}``.

Exit codes: 0 success, 1 usage error, 2 input format error, 3 empty result.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .decoder import NATIVE_SENTINEL, SelectorRegistry, abi_decode, match_selector, normalize
from .errors import DecsError, EmptyResultError, InputFormatError
from .ingest import Kind, RawTransaction
from .metrics import BUCKET_SCHEMES, Mode, load_chains, load_prices
from .pipeline import DEFAULT_BASELINE_ROUTER, RunConfig, RunInputs, run_feed, write_outputs
from .reporting import RecordStore, Scope, bucket_csv, build_bucket_table, build_mart, emit_histogram, mart_csv, select
from .simulator import load_pools
from .stats import SampleGroup, advantage_test, indirect_compare, mann_whitney_u
from .wallets import SnapshotIndexer, refresh_pool

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_EMPTY = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _jsonable(v):
    if isinstance(v, bytes):
        return "0x" + v.hex()
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, int) and not isinstance(v, bool) and v >= 2**53:
        return str(v)
    return v


def _hex_data(text: str) -> bytes:
    if not text.startswith("0x"):
        raise InputFormatError("calldata must be 0x-prefixed hex")
    try:
        return bytes.fromhex(text[2:])
    except ValueError:
        raise InputFormatError("calldata is not valid hex") from None


def cmd_decode(args) -> int:
    registry = SelectorRegistry.load(args.registry)
    data = _hex_data(args.calldata)
    contract = args.contract
    if contract is None and len(data) >= 4:
        matches = sorted({addr for (addr, sel), _ in registry.items() if sel == data[:4]})
        if len(matches) != 1:
            raise InputFormatError(f"selector matches {len(matches)} contracts; pass --contract")
        contract = matches[0]
    sig = match_selector(data, contract or "", registry)
    decoded = abi_decode(data, sig)
    raw = RawTransaction(
        chain_id=args.chain_id,
        tx_hash="0x" + "00" * 32,
        sender="0x" + "00" * 20,
        recipient=contract.lower(),
        value=args.value,
        gas_price=0,
        gas_limit=0,
        calldata=data,
        observed_block=0,
        kind=Kind.MEMPOOL,
    )
    intent = normalize(decoded, sig, raw, wrapped_native=None)
    out = {
        "contract": contract.lower(),
        "function": sig.name,
        "protocol": sig.protocol,
        "params": [str(t) for t in sig.params],
        "values": _jsonable(list(decoded.values)),
        "trailing_bytes": decoded.trailing_bytes,
        "swap": {
            "src_token": intent.src_token,
            "dst_token": intent.dst_token,
            "amount_in": str(intent.amount_in),
            "min_out": None if intent.min_out is None else str(intent.min_out),
            "deadline": intent.deadline,
            "exact_output": intent.exact_output,
            "native_src": intent.src_token == NATIVE_SENTINEL,
        },
    }
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_run(args) -> int:
    mode = Mode(args.mode)
    config = RunConfig(
        mode=mode,
        bucket_scheme=args.bucket_scheme,
        baseline_router=args.baseline_router.lower(),
        intent_gas_price=args.intent_gas_price,
        max_hops=args.max_hops,
    )
    inputs = RunInputs(
        pools=load_pools(args.pools),
        prices=load_prices(args.prices),
        wallets=refresh_pool(SnapshotIndexer(args.wallets), now=args.now),
        chains=load_chains(args.chains),
        registry=SelectorRegistry.load(args.registry) if args.registry else None,
    )
    if mode is Mode.CLASSIC and inputs.registry is None:
        raise InputFormatError("classic mode needs --registry")
    result = run_feed(args.feed, inputs, config)
    write_outputs(result, args.out)
    print(json.dumps(result.summary(), sort_keys=True))
    return EXIT_OK if result.kept else EXIT_EMPTY


def cmd_report(args) -> int:
    store = RecordStore(args.store)
    scope = Scope.load(args.scope)
    table = build_mart(store, scope)
    text = mart_csv(table)
    if args.table:
        Path(args.table).write_text(text)
    if args.table_json:
        Path(args.table_json).write_text(json.dumps(table.to_json(), indent=2, sort_keys=True) + "\n")
    if args.buckets:
        rows = build_bucket_table(store, scope, args.buckets)
        out = bucket_csv(rows)
        if args.bucket_table:
            Path(args.bucket_table).write_text(out)
        else:
            sys.stdout.write(out)
    if args.hist:
        hist = emit_histogram(store, scope, window=args.window, bins=args.bins)
        Path(args.hist).write_text(json.dumps(hist, sort_keys=True) + "\n")
    if not args.table:
        sys.stdout.write(text)
    return EXIT_OK


def _group(records, label: str) -> SampleGroup:
    values = [r.uplift_pct for r in records if r.competitor == label]
    if not values:
        raise EmptyResultError(f"no records for group {label!r}")
    return SampleGroup(label, values)


def cmd_stats(args) -> int:
    records = select(RecordStore(args.store), Scope.load(args.scope))
    a = _group(records, args.group_a)
    if args.test == "prop":
        result = advantage_test(a.clipped(args.clip), alpha=args.alpha)
    else:
        if args.group_b is None:
            raise InputFormatError(f"--test {args.test} needs --group-b")
        b = _group(records, args.group_b)
        if args.test == "t":
            result = indirect_compare(a, b, args.alpha, clip_pct=args.clip)
        else:
            result = mann_whitney_u(a.clipped(args.clip), b.clipped(args.clip), "g1_less", alpha=args.alpha)
    print(json.dumps(result.to_json(), indent=2))
    return EXIT_OK


def cmd_synth(args) -> int:
    from .synthetic import SynthConfig, write_fixture

    cfg = SynthConfig(n_swaps=args.n, seed=args.seed, mode=args.mode, noise=args.noise)
    paths = write_fixture(args.out, cfg)
    print(json.dumps({k: str(v) for k, v in vars(paths).items()}, indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="decs", description="Replayable DEX execution comparison pipeline.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("decode", help="decode one calldata blob against a selector registry")
    d.add_argument("--registry", required=True)
    d.add_argument("--calldata", required=True)
    d.add_argument("--contract")
    d.add_argument("--value", type=int, default=0, help="tx value in wei, for payable swaps")
    d.add_argument("--chain-id", type=int, default=1)
    d.set_defaults(func=cmd_decode)

    r = sub.add_parser("run", help="run the comparison pipeline over a feed")
    r.add_argument("--feed", required=True)
    r.add_argument("--pools", required=True)
    r.add_argument("--prices", required=True)
    r.add_argument("--registry")
    r.add_argument("--wallets", required=True)
    r.add_argument("--chains")
    r.add_argument("--mode", choices=[m.value for m in Mode], default="classic")
    r.add_argument("--out", required=True)
    r.add_argument("--bucket-scheme", choices=sorted(BUCKET_SCHEMES))
    r.add_argument("--baseline-router", default=DEFAULT_BASELINE_ROUTER)
    r.add_argument("--intent-gas-price", type=int, help="wei; required in intent mode")
    r.add_argument("--max-hops", type=int, default=3)
    r.add_argument("--now", type=float, default=0.0, help="wallet refresh timestamp")
    r.set_defaults(func=cmd_run)

    rep = sub.add_parser("report", help="benchmark table, bucket table and histogram data")
    rep.add_argument("--store", required=True)
    rep.add_argument("--scope")
    rep.add_argument("--table")
    rep.add_argument("--table-json")
    rep.add_argument("--hist")
    rep.add_argument("--window", type=float, default=1.5)
    rep.add_argument("--bins", type=int, default=60)
    rep.add_argument("--buckets", choices=sorted(BUCKET_SCHEMES))
    rep.add_argument("--bucket-table")
    rep.set_defaults(func=cmd_report)

    s = sub.add_parser("stats", help="compare uplift distributions of two competitor groups")
    s.add_argument("--store", required=True)
    s.add_argument("--scope")
    s.add_argument("--group-a", required=True)
    s.add_argument("--group-b")
    s.add_argument("--test", choices=["t", "mwu", "prop"], default="t")
    s.add_argument("--alpha", type=float, default=0.05)
    s.add_argument("--clip", type=float, default=5.0)
    s.set_defaults(func=cmd_stats)

    g = sub.add_parser("synth", help="write a synthetic fixture corpus")
    g.add_argument("--out", required=True)
    g.add_argument("--n", type=int, default=1000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--mode", choices=[m.value for m in Mode], default="classic")
    g.add_argument("--noise", type=int, default=0, help="lines per drop category")
    g.set_defaults(func=cmd_synth)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EmptyResultError as exc:
        print(f"decs: {exc.reason}: {exc}", file=sys.stderr)
        return EXIT_EMPTY
    except (DecsError, OSError, ValueError) as exc:
        reason = getattr(exc, "reason", type(exc).__name__)
        print(f"decs: {reason}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
