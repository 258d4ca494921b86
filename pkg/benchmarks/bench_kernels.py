"""Benchmark the numba-accelerated kernels against their numpy twins.

Usage:
    python benchmarks/bench_kernels.py

The same comparison can be forced package-wide with
SECGROWTH_DISABLE_NUMBA=1 (the env flag selects the numpy fallback path);
this script times both implementations directly in one process.
"""

import time

import numpy as np

from secgrowth._accel import USE_NUMBA
from secgrowth.cumulants import _mc_weights_njit, _mc_weights_numpy
from secgrowth.loops import _branch_weights_njit, _branch_weights_numpy


def timeit(fn, *args, repeat=7):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_decay_weights():
    rng = np.random.default_rng(0)
    d, eps = 1.0, 0.5
    eps0 = eps / 2.0
    xi = rng.random((2_000_000, 4))
    u_abs = d * ((1.0 - xi) ** (-1.0 / eps0) - 1.0)
    t_np, ref = timeit(_mc_weights_numpy, u_abs, d, eps, eps0)
    rows = [("decay-bound MC weights (2e6 x 4)", "numpy", t_np, 1.0)]
    if USE_NUMBA:
        _mc_weights_njit(u_abs[:10], d, eps, eps0)  # compile
        t_nb, out = timeit(_mc_weights_njit, u_abs, d, eps, eps0)
        assert np.allclose(out, ref, rtol=1e-12)
        rows.append(("decay-bound MC weights (2e6 x 4)", "numba", t_nb, t_np / t_nb))
    return rows


def bench_branch_weights():
    rng = np.random.default_rng(1)
    omegas = np.sqrt(rng.random((2_000_000, 3)) * 20.0 + 1.0)
    F_vals = np.exp(-omegas) / (1.0 - np.exp(-omegas))
    signs = np.array([1, -1, 1])
    t_np, ref = timeit(_branch_weights_numpy, omegas, F_vals, signs)
    rows = [("spectral branch weights (2e6 x 3)", "numpy", t_np, 1.0)]
    if USE_NUMBA:
        _branch_weights_njit(omegas[:10], F_vals[:10], signs)  # compile
        t_nb, out = timeit(_branch_weights_njit, omegas, F_vals, signs)
        assert np.allclose(out, ref, rtol=1e-12)
        rows.append(("spectral branch weights (2e6 x 3)", "numba", t_nb, t_np / t_nb))
    return rows


def main():
    print(f"numba active: {USE_NUMBA} (set SECGROWTH_DISABLE_NUMBA=1 to force numpy)")
    print(f"{'kernel':<36} {'path':<7} {'best [ms]':>10} {'speedup':>8}")
    for rows in (bench_decay_weights(), bench_branch_weights()):
        for name, path, t, speedup in rows:
            print(f"{name:<36} {path:<7} {t * 1e3:>10.2f} {speedup:>7.2f}x")


if __name__ == "__main__":
    main()
