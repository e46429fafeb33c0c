"""Compare the pure-Python and compiled coverage kernels.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import math
import time

import numpy as np

from dispersion import _purecover

try:
    from dispersion import _fastcover
except ImportError:
    _fastcover = None


def _instance(n, m, density, seed):
    rng = np.random.default_rng(seed)
    return (rng.random((n, m)) < density).astype(np.uint8)


def _time(fn, repeats):
    best = math.inf
    for _ in range(repeats):
        started = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - started)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    print(f"{'case':<40}{'pure':>12}{'compiled':>12}{'speedup':>10}")
    cases = []
    for n, m in ((20, 60), (50, 200), (120, 500)):
        inc = _instance(n, m, 0.15, seed=n)
        cases.append((f"greedy n={n} m={m}",
                      lambda inc=inc: _purecover.greedy_cover(inc),
                      (lambda inc=inc: _fastcover.greedy_cover(inc))
                      if _fastcover else None))
    for n, k, m in ((16, 4, 60), (20, 5, 120), (24, 5, 200)):
        inc = _instance(n, m, 0.15, seed=n + k)
        subsets = math.comb(n, k)
        cases.append((f"exact n={n} k={k} m={m} ({subsets} subsets)",
                      lambda inc=inc, k=k: _purecover.best_cover(inc, k),
                      (lambda inc=inc, k=k: _fastcover.best_cover(inc, k))
                      if _fastcover else None))

    for label, pure_fn, fast_fn in cases:
        pure_t = _time(pure_fn, args.repeats)
        if fast_fn is None:
            print(f"{label:<40}{pure_t * 1e3:>10.2f}ms{'n/a':>12}{'':>10}")
            continue
        fast_t = _time(fast_fn, args.repeats)
        print(f"{label:<40}{pure_t * 1e3:>10.2f}ms{fast_t * 1e3:>10.2f}ms"
              f"{pure_t / fast_t:>9.1f}x")

    if _fastcover is None:
        print("\ncompiled kernels not built; install with Cython available")


if __name__ == "__main__":
    main()
