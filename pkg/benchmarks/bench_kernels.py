"""Time the numba kernels against the numpy/scipy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Both backends are checked to agree before timing.  The first numba call
(JIT compile or cache load) is excluded.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from surftopo import _kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def level_case(n):
    u = np.linspace(0, 2 * np.pi, n, endpoint=False)
    U, V = np.meshgrid(u, u, indexing="ij")
    grid = (np.cos(U) + 2) * np.cos(V) + 0.05 * np.sin(7 * U) * np.cos(5 * V)
    return f"level_components torus {n}x{n}", lambda b: _kernels.level_components(grid, 0.3, True, True, b)


def cluster_case(n):
    rng = np.random.default_rng(0)
    centres = rng.uniform(0, 2 * np.pi, (8, 2))
    pts = centres[rng.integers(0, 8, n)] + rng.normal(0, 1e-8, (n, 2))
    periods = np.array([2 * np.pi, 2 * np.pi])
    return f"cluster_points {n} Newton endpoints", lambda b: _kernels.cluster_points(pts, periods, 1e-5, b)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _kernels.njit is None:
        raise SystemExit("numba is not installed; nothing to compare")
    cases = [level_case(256), level_case(1024), cluster_case(1024), cluster_case(4096)]
    print(f"{'case':40s} {'numba [ms]':>12s} {'numpy [ms]':>12s} {'speedup':>9s}")
    for name, fn in cases:
        a, b = fn("numba"), fn("numpy")
        if not np.array_equal(np.asarray(a), np.asarray(b)):
            raise SystemExit(f"{name}: backends disagree")
        tn = best_of(lambda: fn("numba"), args.repeat)
        tp = best_of(lambda: fn("numpy"), args.repeat)
        print(f"{name:40s} {tn * 1e3:12.2f} {tp * 1e3:12.2f} {tp / tn:8.1f}x")


if __name__ == "__main__":
    main()
