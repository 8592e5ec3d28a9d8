"""Deterministic low-discrepancy sequences used by the error estimators."""

from __future__ import annotations

import numpy as np

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29)


def halton(count, dims, skip=1):
    """First ``count`` points of the Halton sequence in [0,1)^dims.

    Radical-inverse construction with the first ``dims`` primes as bases;
    ``skip`` drops the initial all-zeros point by default. Fully
    deterministic, no RNG involved.
    """
    if dims > len(_PRIMES):
        raise ValueError(f"halton supports up to {len(_PRIMES)} dimensions")
    idx = np.arange(skip, skip + count, dtype=np.int64)
    out = np.empty((count, dims))
    for j in range(dims):
        base = _PRIMES[j]
        x = np.zeros(count)
        denom = np.ones(count)
        i = idx.copy()
        while i.any():
            denom *= base
            x += (i % base) / denom
            i //= base
        out[:, j] = x
    return out


def simplex_points(vertices, unit_points):
    """Map points of [0,1)^n to the simplex via the sorted-coordinates rule.

    Sorting u ascending and taking successive differences of (0, u, 1) gives
    uniform barycentric weights; applied to low-discrepancy input it yields a
    well-spread deterministic point set inside the simplex.
    """
    u = np.sort(unit_points, axis=1)
    n = unit_points.shape[1]
    w = np.empty((unit_points.shape[0], n + 1))
    w[:, 0] = u[:, 0]
    for i in range(1, n):
        w[:, i] = u[:, i] - u[:, i - 1]
    w[:, n] = 1.0 - u[:, n - 1]
    return w @ vertices
