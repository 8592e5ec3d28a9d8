"""Timing comparison of the jitted kernels against their numpy twins.

Run as:  python3 benchmarks/bench_kernels.py
The jitted path requires numba; when it is unavailable (or disabled via
LAMVAR_NO_NUMBA=1) only the numpy column is reported.
"""

import time

import numpy as np

from lamvar import kernels
from lamvar.backend import HAS_NUMBA


def _time(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def _report(name, numpy_fn, jit_fn, args):
    t_np = _time(numpy_fn, *args)
    if jit_fn is not None:
        jit_fn(*args)  # compile outside the timed region
        t_jit = _time(jit_fn, *args)
        ratio = t_np / t_jit if t_jit > 0 else float("inf")
        print(f"{name:24s} numpy {t_np * 1e3:9.3f} ms   numba {t_jit * 1e3:9.3f} ms   speedup {ratio:5.1f}x")
    else:
        print(f"{name:24s} numpy {t_np * 1e3:9.3f} ms   numba       n/a")


def main():
    rng = np.random.default_rng(0)

    tri = rng.random((3, 2))
    d2 = np.array([0.6, 0.8])
    offs = np.linspace(-0.2, 1.2, 20_000)

    tet = rng.random((4, 3))
    d3 = np.array([1.0, 0.0, 0.0])
    u, v = kernels._plane_frame(d3)

    pts = rng.random((200_000, 2))
    M = rng.random((2, 2))
    b = rng.random(2)
    coefs = rng.random((4, 2))
    dirs = rng.random((4, 2))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)

    v0 = tri[0]
    invT = np.linalg.inv((tri[1:] - tri[0]).T)

    jit = HAS_NUMBA
    print(f"numba available: {jit}")
    _report(
        "tri_slice_lengths",
        kernels.tri_slice_lengths_numpy,
        kernels._tri_slice_lengths_jit if jit else None,
        (tri, d2, offs),
    )
    _report(
        "tet_slice_areas",
        lambda *a: kernels.tet_slice_areas_numpy(*a, kernels._TET_E0, kernels._TET_E1, u, v),
        (lambda *a: kernels._tet_slice_areas_jit(*a, kernels._TET_E0, kernels._TET_E1, u, v)) if jit else None,
        (tet, d3, offs),
    )
    _report(
        "staircase_eval",
        kernels.staircase_eval_numpy,
        kernels._staircase_eval_jit if jit else None,
        (pts, M, b, coefs, dirs, 16.0),
    )
    _report(
        "points_in_simplex",
        kernels.points_in_simplex_numpy,
        kernels._points_in_simplex_jit if jit else None,
        (pts, v0, invT, 1e-12),
    )


if __name__ == "__main__":
    main()
