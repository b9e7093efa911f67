"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 3] [--threads 1] [--quick]

Prints one line per kernel and size: best wall time for each backend,
the speedup, and whether the outputs are bitwise identical.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from uniformize import _fallback
from uniformize.generators import GeneratorSpec, generate

try:
    from uniformize import _kernels
except ImportError:  # pragma: no cover
    _kernels = None


def best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def same(a, b) -> bool:
    if isinstance(a, np.ndarray):
        return bool(np.array_equal(a, b))
    return tuple(a) == tuple(b) if isinstance(a, tuple) else a == b


def cases(quick: bool):
    trees = [4, 6] if quick else [6, 8, 10]
    for R in trees:
        g = generate(GeneratorSpec("regular-tree", radius=R))
        yield "apsp", f"tree R={R} n={g.n}", lambda m, g=g: m.apsp(*g.csr(), g.n, THREADS)
    for rings in ([3, 4] if quick else [4, 5, 6]):
        g = generate(GeneratorSpec("hyperbolic-tiling", radius=rings))
        D = np.ascontiguousarray(g.distances)
        yield "delta_global", f"{{7,3}} rings={rings} n={g.n}", lambda m, D=D: m.delta_global(D, THREADS)
        yield "delta_base", f"{{7,3}} rings={rings} n={g.n}", lambda m, D=D: m.delta_base(D, 0, THREADS)
    for n in ([64, 128] if quick else [128, 256, 512]):
        rng = np.random.default_rng(n)
        W = rng.random((n, n))
        W = np.ascontiguousarray((W + W.T) / 2)
        yield "chain_closure", f"random n={n}", lambda m, W=W: m.chain_closure(W, THREADS)


THREADS = 1


def main() -> None:
    global THREADS
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--quick", action="store_true", help="small sizes only")
    args = ap.parse_args()
    THREADS = args.threads
    if _kernels is None:
        raise SystemExit("compiled extension not built; reinstall with Cython available")
    print(f"{'kernel':<14} {'case':<26} {'compiled s':>11} {'python s':>11} {'speedup':>8}  identical")
    for name, label, run in cases(args.quick):
        tc, oc = best_of(lambda: run(_kernels), args.repeat)
        tp, op = best_of(lambda: run(_fallback), args.repeat)
        print(f"{name:<14} {label:<26} {tc:>11.4f} {tp:>11.4f} {tp / tc:>8.1f}  {same(oc, op)}")


if __name__ == "__main__":
    main()
