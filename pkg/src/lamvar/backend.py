"""Numba/numpy backend selection for the hot kernels.

The accelerated path uses ``numba.njit`` compiled loops; the fallback path is
pure numpy. Selection happens once at import time:

* ``LAMVAR_NO_NUMBA=1`` (or ``true``/``yes``) forces the numpy path;
* if numba is not importable the numpy path is used automatically.

``backend_name()`` reports which path is active so run manifests can record it.
"""

from __future__ import annotations

import os


def _resolve() -> bool:
    flag = os.environ.get("LAMVAR_NO_NUMBA", "").strip().lower()
    if flag in ("1", "true", "yes"):
        return False
    try:
        import numba  # noqa: F401
    except ImportError:
        return False
    return True


HAS_NUMBA = _resolve()


def backend_name() -> str:
    return "numba" if HAS_NUMBA else "numpy"


def maybe_njit(func):
    """Compile ``func`` with numba when enabled, else return it unchanged.

    The compiled function keeps the original under ``.py_func`` (numba's own
    attribute); the numpy path exposes the same attribute so benchmarks can
    time both implementations uniformly.
    """
    if HAS_NUMBA:
        from numba import njit

        return njit(cache=True)(func)
    func.py_func = func
    return func
