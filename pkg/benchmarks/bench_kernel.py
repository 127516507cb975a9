"""Time the compiled enumeration core against the pure-Python fallback.

Usage: python3 benchmarks/bench_kernel.py [--n 5] [--types 6] [--grid 14] [--repeat 3]
"""

import argparse
import random
import time
from fractions import Fraction

from ordered_pricing import kernel
from ordered_pricing.scalar import INF


def make_case(rng, n, m, g):
    values = [sorted(Fraction(rng.randint(0, 40)) for _ in range(n)) for _ in range(m)]
    w = [rng.randint(1, 9) for _ in range(m)]
    probs = [Fraction(x, sum(w)) for x in w]
    grid = sorted({Fraction(rng.randint(1, 40)) for _ in range(g)}) + [INF]
    return values, probs, grid


def timed(fn, repeat):
    best = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        took = time.perf_counter() - t0
        best = took if best is None else min(best, took)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--types", type=int, default=6)
    ap.add_argument("--grid", type=int, default=14)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    values, probs, grid = make_case(random.Random(args.seed), args.n, args.types, args.grid)
    count = kernel.count_monotone(len(grid), args.n)
    print(f"backend at import: {kernel.backend()}")
    print(f"n={args.n} types={args.types} grid={len(grid)} monotone assignments={count}")
    t_py, py = timed(lambda: kernel.best_by_endpoints(values, probs, grid, force_python=True), args.repeat)
    print(f"pure python  {t_py:9.4f}s")
    if kernel.backend() != "compiled":
        print("compiled core not available; rebuild with pip install -e . --no-build-isolation")
        return
    t_c, comp = timed(lambda: kernel.best_by_endpoints(values, probs, grid), args.repeat)
    assert comp.best() == py.best(), "backends disagree"
    print(f"compiled     {t_c:9.4f}s")
    print(f"speedup      {t_py / t_c:9.1f}x  (results identical)")


if __name__ == "__main__":
    main()
