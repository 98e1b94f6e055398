"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each row runs the same kernel on identical inputs through both backends,
checks that the outputs agree and prints the best-of-N wall time.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from ccztwist._kernels import backends
from ccztwist.gfield import get_field


def _best(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(quick: bool):
    rng = np.random.default_rng(7)
    sizes = [(2, 10), (3, 6)] if quick else [(2, 10), (2, 14), (3, 6), (3, 8), (5, 4)]
    for p, n in sizes:
        ctx = get_field(p, n)
        q = ctx.q
        table = rng.integers(0, q, q, dtype=np.int64)
        cube = ctx.power(ctx.all_ranks(), 3)
        gdig = np.array(ctx.digits(ctx.generator_rank), dtype=np.int64)
        tag = f"p={p} n={n}"
        yield f"exp_table  {tag}", lambda k, p=p, n=n, g=gdig, c=ctx: k.exp_table(p, n, c._mod_arr, g)
        if p == 2:
            bits = rng.integers(0, 2, (8, q), dtype=np.int64)
            yield f"fwht x8    {tag}", lambda k, b=bits: k.fwht(b)
        else:
            comp = rng.integers(0, p, (4, q), dtype=np.int64)
            yield f"gr_walsh x4 {tag}", lambda k, f=comp, p=p, n=n: k.group_ring_walsh(f, p, n)
        rows = np.arange(1, min(q, 257), dtype=np.int64)
        yield f"ddt_rows   {tag}", lambda k, t=table, p=p, n=n, r=rows: k.ddt_rows(t, p, n, n, r)
        if q <= 6561:
            yield f"interp     {tag}", lambda k, v=cube, c=ctx, p=p, n=n: k.interpolate(v, c.exp, c.log, p, n)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args(argv)
    bk = backends()
    if "compiled" not in bk:
        print("compiled extension not built; only the numpy backend is available", file=sys.stderr)
    names = list(bk)
    print(f"{'kernel':<24}" + "".join(f"{n:>12}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, run in cases(args.quick):
        outs = {n: np.asarray(run(bk[n])) for n in names}
        ref = outs["python"]
        for n, o in outs.items():
            if not np.array_equal(o, ref):
                print(f"{label}: {n} output differs from python", file=sys.stderr)
                return 1
        times = {n: _best(lambda n=n: run(bk[n]), args.repeat) for n in names}
        line = f"{label:<24}" + "".join(f"{times[n] * 1e3:>10.2f}ms" for n in names)
        if len(names) > 1:
            line += f"{times['python'] / max(times['compiled'], 1e-9):>11.1f}x"
        print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
