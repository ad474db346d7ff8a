#!/usr/bin/env python3
"""Benchmark the jitted kernel variants against their pure-numpy twins.

Runs each hot loop on a representative workload (10 s of 16 kHz audio,
the 64x128 quadrature grid, a 257x64 spectrogram sweep) and reports the
timing ratio. Outputs are cross-checked before timing. These numbers are
why overlap_add/legendre default to the jit path while the contribution
sum and phase mean stay on vectorized numpy.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from binauralkit import _kernels as k


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench(name, jit_fn, np_fn, check, repeats):
    jit_fn()  # compile before timing
    t_jit = timeit(jit_fn, repeats)
    t_np = timeit(np_fn, repeats)
    ok = check()
    winner = "numba" if t_jit < t_np else "numpy"
    print(
        f"{name:<28} numba {t_jit * 1e3:8.2f} ms   numpy {t_np * 1e3:8.2f} ms   "
        f"ratio {t_np / t_jit:5.2f}x   winner {winner:<5}   agree={ok}"
    )
    return ok


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if not k.HAVE_NUMBA:
        print("numba unavailable; nothing to compare")
        return 0

    rng = np.random.default_rng(0)
    results = []

    # inverse-STFT overlap-add over 10 s of audio at the default geometry
    n_frames = 1 + 160000 // 160
    frames = rng.normal(size=(n_frames, 512))
    window = rng.normal(size=512) ** 2
    out_len = 512 + (n_frames - 1) * 160
    results.append(bench(
        "overlap_add (10 s)",
        lambda: k._ola_jit(frames, window, 160, out_len),
        lambda: k.overlap_add_numpy(frames, window, 160, out_len),
        lambda: np.allclose(
            k._ola_jit(frames, window, 160, out_len)[0],
            k.overlap_add_numpy(frames, window, 160, out_len)[0],
        ),
        args.repeats,
    ))

    # Legendre recurrence over the quadrature grid, all orders l <= 2
    grid = np.repeat(np.sin(np.linspace(-1.5, 1.5, 64)), 128)
    results.append(bench(
        "legendre l<=2 (64x128 grid)",
        lambda: [k._legendre_jit(l, m, grid) for l in range(3) for m in range(l + 1)],
        lambda: [k.legendre_numpy(l, m, grid) for l in range(3) for m in range(l + 1)],
        lambda: np.allclose(k._legendre_jit(2, 1, grid), k.legendre_numpy(2, 1, grid)),
        args.repeats,
    ))

    # per-ear contribution sums for an 8-speaker render of 10 s audio
    stack = rng.normal(size=(8, 160000))
    results.append(bench(
        "sum_contributions (8x10 s)",
        lambda: k._kahan_jit(stack),
        lambda: k.sum_contributions_numpy(stack),
        lambda: np.allclose(k._kahan_jit(stack), k.sum_contributions_numpy(stack)),
        args.repeats,
    ))

    # wrapped-phase mean over a 94-window metrics sweep
    a = rng.normal(size=(257, 64)) + 1j * rng.normal(size=(257, 64))
    b = rng.normal(size=(257, 64)) + 1j * rng.normal(size=(257, 64))
    results.append(bench(
        "phase_mean_abs (94 windows)",
        lambda: [k._phase_jit(a, b) for _ in range(94)],
        lambda: [k.phase_mean_abs_numpy(a, b) for _ in range(94)],
        lambda: abs(k._phase_jit(a, b) - k.phase_mean_abs_numpy(a, b)) < 1e-12,
        args.repeats,
    ))

    print(
        f"\nactive dispatch: overlap_add/legendre on "
        f"{'numba' if k.USE_NUMBA else 'numpy'} (BINAURALKIT_NUMBA toggles); "
        f"sum/phase always numpy"
    )
    return 0 if all(results) else 1


if __name__ == "__main__":
    raise SystemExit(main())
