"""Timing comparison of the jitted kernels against the numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py``. Each kernel is warmed
up once (numba compiles on first call), then timed over enough
repetitions to be meaningful. Typical speedups on a laptop-class core
are 2-10x depending on array shape; the numpy path stays available via
``RINGPAIR_NUMBA=0`` for environments without a working compiler.
"""

from __future__ import annotations

import time

import numpy as np

from ringpair import kernels

RNG = np.random.default_rng(7)


def _time(fn, *args, repeat: int = 200) -> float:
    fn(*args)  # warm-up / compile
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - t0) / repeat


def bench_lorentzian_comb() -> None:
    omega = np.linspace(1.20e15, 1.23e15, 20001)
    centers = np.linspace(1.205e15, 1.225e15, 9)
    hw = np.full(9, 1.2e10)
    peaks = RNG.uniform(50.0, 150.0, 9)
    t_np = _time(kernels.lorentzian_comb_numpy, omega, centers, hw, peaks)
    row = f"lorentzian_comb     20001x9    numpy {t_np * 1e3:8.3f} ms"
    if kernels._HAVE_NUMBA:
        t_jit = _time(kernels._lorentzian_comb_jit, omega, centers, hw, peaks)
        row += f"    numba {t_jit * 1e3:8.3f} ms    speedup {t_np / t_jit:5.1f}x"
    print(row)


def bench_dc_overlap() -> None:
    z = np.linspace(0.0, 4.7e-5, 15 * 512)
    t_np = _time(kernels.dc_overlap_integrand_numpy, z, 66666.7, 0.3, 1e4)
    row = f"dc_overlap_integrand 7680 pts  numpy {t_np * 1e3:8.3f} ms"
    if kernels._HAVE_NUMBA:
        t_jit = _time(kernels._dc_overlap_integrand_jit, z, 66666.7, 0.3, 1e4)
        row += f"    numba {t_jit * 1e3:8.3f} ms    speedup {t_np / t_jit:5.1f}x"
    print(row)


def bench_pair_kernel() -> None:
    u = np.linspace(-1.5e12, 1.5e12, 15 * 512)
    t_np = _time(kernels.pair_kernel_numpy, u, 2.4e10, 2.4e10, 1.215e15, 1.217e15)
    row = f"pair_kernel          7680 pts  numpy {t_np * 1e3:8.3f} ms"
    if kernels._HAVE_NUMBA:
        t_jit = _time(kernels._pair_kernel_jit, u, 2.4e10, 2.4e10, 1.215e15, 1.217e15)
        row += f"    numba {t_jit * 1e3:8.3f} ms    speedup {t_np / t_jit:5.1f}x"
    print(row)


if __name__ == "__main__":
    print(f"numba available: {kernels._HAVE_NUMBA}; selected path: "
          f"{'numba' if kernels.USING_NUMBA else 'numpy'}")
    bench_lorentzian_comb()
    bench_dc_overlap()
    bench_pair_kernel()
