#!/usr/bin/env python3
"""Benchmark the compiled kernels against their pure NumPy fallbacks.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Reports wall time per call for each kernel on representative workloads
and the maximum relative deviation between the two implementations.
"""

import argparse
import time

import numpy as np

from tickcorr._kernels import _fallback

try:
    from tickcorr._kernels import _core
except ImportError:
    _core = None


def timeit(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def rel_dev(a, b):
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    scale = max(float(np.max(np.abs(b))), 1e-300)
    return float(np.max(np.abs(a - b))) / scale


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    if _core is None:
        print("compiled extension not built; nothing to compare")
        return

    rng = np.random.default_rng(0)
    rows = []

    # Fourier coefficients on a non-uniform grid (the FFT fast path does
    # not apply off-grid; this is the kernel's home turf)
    n, n_coeffs = 10_000, 2_000
    tau = np.sort(rng.uniform(0, 2 * np.pi, n))
    delta = rng.normal(0, 1e-3, n)
    tc, a = timeit(lambda: _core.mm_coeffs(tau, delta, n_coeffs), args.repeat)
    tp, b = timeit(lambda: _fallback.mm_coeffs(tau, delta, n_coeffs), args.repeat)
    rows.append(("mm_coeffs (n=10k, N=2k)", tc, tp, rel_dev(a, b)))

    # pairwise overlap sweep on long tick grids
    t1 = np.cumsum(rng.uniform(0.2, 2.0, 200_000))
    t2 = np.cumsum(rng.uniform(0.5, 5.0, 80_000))
    d1 = rng.normal(0, 1e-4, len(t1) - 1)
    d2 = rng.normal(0, 1e-4, len(t2) - 1)
    tc, a = timeit(lambda: _core.hy_pair(t1, d1, t2, d2), args.repeat)
    tp, b = timeit(lambda: _fallback.hy_pair(t1, d1, t2, d2), args.repeat)
    rows.append(("hy_pair (200k x 80k ticks)", tc, tp, abs(a - b) / max(abs(b), 1e-300)))

    # one trading day of variance recursion
    z = rng.standard_normal(86_400)
    tc, (pa, fa) = timeit(
        lambda: _core.garch_variance_scan(0.6, 0.035, 0.636, 0.296, 1 / 86_400, z, False),
        args.repeat,
    )
    tp, (pb, fb) = timeit(
        lambda: _fallback.garch_variance_scan(0.6, 0.035, 0.636, 0.296, 1 / 86_400, z, False),
        args.repeat,
    )
    rows.append(("garch_variance_scan (86,400 steps)", tc, tp, rel_dev(pa, pb)))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'compiled':>10}  {'pure':>10}  {'speedup':>8}  {'max rel dev':>12}")
    for name, tc, tp, dev in rows:
        print(f"{name:<{width}}  {tc * 1e3:>8.2f}ms  {tp * 1e3:>8.2f}ms  {tp / tc:>7.1f}x  {dev:>12.2e}")


if __name__ == "__main__":
    main()
