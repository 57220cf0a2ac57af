#!/usr/bin/env python3
"""Throughput comparison of the compiled and pure-NumPy witness kernels.

The witness kernel (4x4 Hermitian eigensolve + symplectic negativity per
point) dominates sweep runtime, so this is the number that decides whether a
101x101 max-over-period map takes seconds or minutes.

Usage: python benchmarks/bench_witness.py [n_points]
"""

import sys
import time

import numpy as np

from ptmodes import _kernels_py

try:
    from ptmodes import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def make_batch(n, seed=123):
    rng = np.random.default_rng(seed)
    B1 = rng.uniform(0, 0.8, n)
    B2 = rng.uniform(0, 0.8, n)
    rest = rng.normal(0, 0.35, (8, n))
    return (B1, B2) + tuple(np.ascontiguousarray(r) for r in rest)


def bench(fn, batch, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*batch)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 500_000
    batch = make_batch(n)
    t_py = bench(_kernels_py.witness_batch, batch)
    print(f"points: {n}")
    print(f"numpy backend   : {t_py:8.3f} s   ({n / t_py / 1e6:6.2f} Mpts/s)")
    if _kernels_c is None:
        print("compiled backend: not built")
        return
    t_c = bench(_kernels_c.witness_batch, batch)
    print(f"compiled backend: {t_c:8.3f} s   ({n / t_c / 1e6:6.2f} Mpts/s)")
    print(f"speedup         : {t_py / t_c:8.2f}x")
    a = _kernels_py.witness_batch(*batch)
    b = _kernels_c.witness_batch(*batch)
    dev = 0.0
    for x, y in zip(a[:5], b[:5]):
        m = np.isnan(x) & np.isnan(y)
        dev = max(dev, float(np.abs(np.where(m, 0, x) - np.where(m, 0, y)).max()))
    print(f"cross-check     : max deviation {dev:.2e}, flags identical: "
          f"{bool(np.array_equal(a[5], b[5]))}")


if __name__ == "__main__":
    main()
