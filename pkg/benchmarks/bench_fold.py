"""Benchmark the compiled log-domain fold against the pure-Python one.

Run:  python3 benchmarks/bench_fold.py [--sizes 1000,30000,300000]

The fold is the inner loop of every grid majorant: a left fold of
one-ulp-inflated log-domain additions.  Both backends must agree bit
for bit; this script asserts that before timing.
"""

from __future__ import annotations

import argparse
import math
import time

import numpy as np

from abcertify.xreal import FOLD_BACKEND, fold_add_logs, fold_add_logs_py


def _sample_logs(n: int, rng: np.random.Generator) -> np.ndarray:
    """Term logs shaped like a certification window (wide dynamic range)."""
    logs = rng.uniform(-2500.0, -0.5, n)
    # sprinkle in exact zeros (empty grid cells fold as -inf)
    mask = rng.random(n) < 0.01
    logs[mask] = -math.inf
    return np.ascontiguousarray(logs)


def _time(fn, arr: np.ndarray, repeats: int) -> float:
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(arr)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="1000,30000,300000")
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    rng = np.random.default_rng(7)
    print(f"active backend: {FOLD_BACKEND}")
    if FOLD_BACKEND == "python":
        print("compiled extension not built; timing the python fold only")

    header = f"{'n':>9}  {'python':>12}  {'compiled':>12}  {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        arr = _sample_logs(n, rng)
        ref = fold_add_logs_py(arr)
        got = fold_add_logs(arr)
        if got != ref:
            raise SystemExit(
                f"backend mismatch at n={n}: python={ref!r} active={got!r}"
            )
        t_py = _time(fold_add_logs_py, arr, args.repeats)
        if FOLD_BACKEND == "compiled":
            t_c = _time(fold_add_logs, arr, args.repeats)
            print(f"{n:>9}  {t_py * 1e3:>10.3f}ms  {t_c * 1e3:>10.3f}ms  {t_py / t_c:>7.1f}x")
        else:
            print(f"{n:>9}  {t_py * 1e3:>10.3f}ms  {'-':>12}  {'-':>8}")


if __name__ == "__main__":
    main()
