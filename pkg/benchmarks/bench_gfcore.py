"""Compare the compiled and pure-Python finite-field kernels.

Run with ``python benchmarks/bench_gfcore.py [--q 9] [--n 12] [--repeat 5]``.
"""
from __future__ import annotations

import argparse
import random
import timeit

from sdhall import gf


def random_matrix(rng: random.Random, q: int, n: int):
    return [[rng.randrange(q) for _ in range(n)] for _ in range(n)]


def bench(backend: str, q: int, n: int, repeat: int, number: int) -> dict[str, float]:
    gf.set_backend(backend)
    F = gf.finite_field(q)
    rng = random.Random(0)
    mats = [random_matrix(rng, q, n) for _ in range(8)]
    ops = {
        "rank": lambda: [F.rank(m, n) for m in mats],
        "nullspace": lambda: [F.nullspace(m, n) for m in mats],
        "matmul": lambda: [F.matmul(a, b) for a, b in zip(mats, mats[1:])],
    }
    return {name: min(timeit.repeat(fn, repeat=repeat, number=number)) / number for name, fn in ops.items()}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--q", type=int, default=9)
    ap.add_argument("--n", type=int, default=12)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=20)
    args = ap.parse_args()
    original = gf.backend_name()
    results = {}
    try:
        for name in sorted(gf.BACKENDS):
            results[name] = bench(name, args.q, args.n, args.repeat, args.number)
    finally:
        gf.set_backend(original)
    print(f"q = {args.q}, {args.n} x {args.n} matrices, seconds per batch of 8")
    print(f"{'op':<10}" + "".join(f"{name:>12}" for name in sorted(results)))
    for op in next(iter(results.values())):
        print(f"{op:<10}" + "".join(f"{results[name][op]:>12.6f}" for name in sorted(results)))
    if "compiled" in results:
        for op, t in results["python"].items():
            print(f"speedup {op}: {t / results['compiled'][op]:.1f}x")


if __name__ == "__main__":
    main()
