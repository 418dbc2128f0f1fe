#!/usr/bin/env python3
"""Time the compiled kernels against their numpy twins.

Runs each pairwise grid kernel on square node grids of increasing size and
reports the per-call wall time of the compiled (numba) binding next to the
numpy broadcast fallback, plus the speedup. The compiled path is what the
integrator uses by default; the fallback is what you get with
HOLOLINK_NO_NUMBA=1. The paths are checked for agreement on every size
before timing (bitwise for the real kernels; a-few-ulps for the complex
ones, where numpy's fused SIMD complex multiplies round differently).

Usage: python3 benchmarks/bench_kernels.py [--sizes 64,128,256,512] [--repeat 5]
"""

import argparse
import time

import numpy as np

from hololink import _kernels


def _time(fn, args, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def _real_grid(rng, n):
    x = rng.normal(size=(n, 3))
    y = rng.normal(size=(n, 3)) + np.array([4.0, 0.0, 0.0])
    dx = rng.normal(size=(n, 3))
    dy = rng.normal(size=(n, 3))
    return x, dx, y, dy


def _complex_grid(rng, n):
    def c(shape):
        return rng.normal(size=shape) + 1j * rng.normal(size=shape)
    z = c((n, 3))
    w = c((n, 3)) + np.array([4.0, 0.0, 0.0])
    return z, c((n, 3)), w, c((n, 3))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="64,128,256,512",
                    help="comma-separated grid side lengths")
    ap.add_argument("--repeat", type=int, default=5,
                    help="timing repetitions (best of)")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    if not _kernels.HAS_NUMBA:
        print("compiled path unavailable (numba missing or HOLOLINK_NO_NUMBA "
              "set); timing the numpy fallback against itself")

    pairs = [
        ("gauss_grid", _kernels.gauss_grid, _kernels.gauss_grid_np, _real_grid),
        ("bm_grid", _kernels.bm_grid, _kernels.bm_grid_np, _complex_grid),
        ("clink_grid", _kernels.clink_grid, _kernels.clink_grid_np, _complex_grid),
        ("min_dist", _kernels.min_dist, _kernels.min_dist_np,
         lambda rng, n: (rng.normal(size=(n, 3)),
                         rng.normal(size=(n, 3)) + np.array([4.0, 0.0, 0.0]))),
    ]

    rng = np.random.default_rng(0)
    print(f"{'kernel':<12}{'n':>6}{'compiled':>12}{'numpy':>12}"
          f"{'speedup':>9}{'max rel diff':>14}")
    for name, fast, slow, make in pairs:
        for n in sizes:
            grid = make(rng, n)
            a, b = np.asarray(fast(*grid)), np.asarray(slow(*grid))
            rel = float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))
            if rel > 1e-12:
                raise SystemExit(f"{name}: paths disagree at n={n} "
                                 f"(rel diff {rel:.2e})")
            fast(*grid)  # warm (first call may compile)
            t_fast = _time(fast, grid, args.repeat)
            t_slow = _time(slow, grid, args.repeat)
            print(f"{name:<12}{n:>6}{t_fast * 1e3:>10.3f}ms"
                  f"{t_slow * 1e3:>10.3f}ms{t_slow / t_fast:>8.1f}x"
                  f"{rel:>14.2e}")


if __name__ == "__main__":
    main()
