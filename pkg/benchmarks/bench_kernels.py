"""Time the numba kernels against the pure-numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5] [--json out.json]

Each kernel runs once untimed first so numba compilation is excluded.
Outputs are checked for equality before timings are reported.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from decs import kernels


def _best(fn, args, repeat: int) -> float:
    fn(*args)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def _same(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return bool(np.array_equal(a, b))


def cases(rng: np.random.Generator):
    ups = np.round(rng.normal(0.1, 0.6, 500_000), 3)
    ranks_in = np.round(rng.normal(0, 1, 200_000), 2)
    weights = rng.integers(0, 40, 20)
    yield "bin_counts 500k", kernels.bin_counts_numpy, kernels.bin_counts_numba, (ups, -1.5, 1.5, 60)
    yield "midranks 200k", kernels.midranks_numpy, kernels.midranks_numba, (ranks_in,)
    yield "tie_sizes 200k", kernels.tie_sizes_numpy, kernels.tie_sizes_numba, (ranks_in,)
    yield "subset_sum_counts n=20 k=10", kernels.subset_sum_counts_numpy, kernels.subset_sum_counts_numba, (weights, 10)


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", help="write results here as well")
    args = ap.parse_args(argv)
    if not kernels.HAVE_NUMBA:
        print("numba unavailable or disabled (DECS_DISABLE_NUMBA); nothing to compare", file=sys.stderr)
        return 1
    rows = []
    print(f"{'kernel':32s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    for name, np_fn, nb_fn, fn_args in cases(np.random.default_rng(args.seed)):
        if not _same(np_fn(*fn_args), nb_fn(*fn_args)):
            print(f"{name}: backends disagree", file=sys.stderr)
            return 2
        t_np, t_nb = _best(np_fn, fn_args, args.repeat), _best(nb_fn, fn_args, args.repeat)
        rows.append({"kernel": name, "numpy_s": t_np, "numba_s": t_nb, "speedup": t_np / t_nb})
        print(f"{name:32s} {t_np * 1e3:10.2f} {t_nb * 1e3:10.2f} {t_np / t_nb:7.1f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
