"""Hot numeric kernels with numba-compiled and pure-numpy implementations.

Each kernel has two interchangeable implementations:

* a loop version compiled with ``numba.njit(cache=True)`` (default), and
* a vectorized numpy version (selected by ``LAMVAR_NO_NUMBA=1`` or when
  numba is unavailable).

The public names (``tri_slice_lengths``, ``tet_slice_areas``,
``staircase_eval``, ``points_in_simplex``) are bound to the active backend at
import. Callers must pre-nudge hyperplane offsets so that no simplex vertex
lies on a queried hyperplane; the slicing kernels treat vertices as strictly
on one side.
"""

from __future__ import annotations

import numpy as np

from .backend import HAS_NUMBA, maybe_njit

_TRI_E0 = np.array([0, 1, 2], dtype=np.int64)
_TRI_E1 = np.array([1, 2, 0], dtype=np.int64)
_TET_E0 = np.array([0, 0, 0, 1, 1, 2], dtype=np.int64)
_TET_E1 = np.array([1, 2, 3, 2, 3, 3], dtype=np.int64)


def _tri_slice_lengths_loop(verts, d, offsets):
    m = offsets.shape[0]
    out = np.zeros(m)
    t = np.empty(3)
    for i in range(3):
        t[i] = verts[i, 0] * d[0] + verts[i, 1] * d[1]
    for j in range(m):
        off = offsets[j]
        cnt = 0
        x0 = 0.0
        y0 = 0.0
        x1 = 0.0
        y1 = 0.0
        for e in range(3):
            i0 = e
            i1 = e + 1 if e < 2 else 0
            a = t[i0] - off
            b = t[i1] - off
            if (a < 0.0 and b > 0.0) or (a > 0.0 and b < 0.0):
                w = a / (a - b)
                px = verts[i0, 0] + w * (verts[i1, 0] - verts[i0, 0])
                py = verts[i0, 1] + w * (verts[i1, 1] - verts[i0, 1])
                if cnt == 0:
                    x0 = px
                    y0 = py
                else:
                    x1 = px
                    y1 = py
                cnt += 1
        if cnt >= 2:
            out[j] = np.sqrt((x1 - x0) ** 2 + (y1 - y0) ** 2)
    return out


def tri_slice_lengths_numpy(verts, d, offsets):
    t = verts @ d
    a = t[_TRI_E0][:, None] - offsets[None, :]
    b = t[_TRI_E1][:, None] - offsets[None, :]
    straddle = ((a < 0) & (b > 0)) | ((a > 0) & (b < 0))
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(straddle, a / (a - b), 0.0)
    p0 = verts[_TRI_E0]
    p1 = verts[_TRI_E1]
    pts = p0[:, None, :] + w[:, :, None] * (p1 - p0)[:, None, :]
    best = np.zeros(offsets.shape[0])
    for e0 in range(3):
        for e1 in range(e0 + 1, 3):
            both = straddle[e0] & straddle[e1]
            dist = np.linalg.norm(pts[e0] - pts[e1], axis=-1)
            best = np.where(both, np.maximum(best, dist), best)
    return best


def _plane_frame(d):
    # pick the axis least aligned with d, orthonormalize against d
    ax = int(np.argmin(np.abs(d)))
    u = np.zeros(3)
    u[ax] = 1.0
    u = u - (u @ d) * d
    u = u / np.linalg.norm(u)
    v = np.cross(d, u)
    return u, v


def _tet_slice_areas_loop(verts, d, offsets, e0, e1, u, v):
    m = offsets.shape[0]
    out = np.zeros(m)
    t = np.empty(4)
    for i in range(4):
        t[i] = verts[i, 0] * d[0] + verts[i, 1] * d[1] + verts[i, 2] * d[2]
    px = np.empty(4)
    py = np.empty(4)
    ang = np.empty(4)
    for j in range(m):
        off = offsets[j]
        cnt = 0
        for e in range(6):
            i0 = e0[e]
            i1 = e1[e]
            a = t[i0] - off
            b = t[i1] - off
            if (a < 0.0 and b > 0.0) or (a > 0.0 and b < 0.0):
                w = a / (a - b)
                gx = verts[i0, 0] + w * (verts[i1, 0] - verts[i0, 0])
                gy = verts[i0, 1] + w * (verts[i1, 1] - verts[i0, 1])
                gz = verts[i0, 2] + w * (verts[i1, 2] - verts[i0, 2])
                if cnt < 4:
                    px[cnt] = gx * u[0] + gy * u[1] + gz * u[2]
                    py[cnt] = gx * v[0] + gy * v[1] + gz * v[2]
                    cnt += 1
        if cnt < 3:
            continue
        cx = 0.0
        cy = 0.0
        for i in range(cnt):
            cx += px[i]
            cy += py[i]
        cx /= cnt
        cy /= cnt
        for i in range(cnt):
            ang[i] = np.arctan2(py[i] - cy, px[i] - cx)
        # insertion sort of at most 4 points by angle
        for i in range(1, cnt):
            ka = ang[i]
            kx = px[i]
            ky = py[i]
            q = i - 1
            while q >= 0 and ang[q] > ka:
                ang[q + 1] = ang[q]
                px[q + 1] = px[q]
                py[q + 1] = py[q]
                q -= 1
            ang[q + 1] = ka
            px[q + 1] = kx
            py[q + 1] = ky
        area = 0.0
        for i in range(cnt):
            q = i + 1 if i < cnt - 1 else 0
            area += px[i] * py[q] - px[q] * py[i]
        out[j] = 0.5 * abs(area)
    return out


_tet_slice_areas_jit = maybe_njit(_tet_slice_areas_loop)
_tri_slice_lengths_jit = maybe_njit(_tri_slice_lengths_loop)


def tet_slice_areas_numpy(verts, d, offsets, e0, e1, u, v):
    t = verts @ d
    a = t[e0][:, None] - offsets[None, :]
    b = t[e1][:, None] - offsets[None, :]
    straddle = ((a < 0) & (b > 0)) | ((a > 0) & (b < 0))
    with np.errstate(divide="ignore", invalid="ignore"):
        w = np.where(straddle, a / (a - b), 0.0)
    p0 = verts[e0]
    p1 = verts[e1]
    pts = p0[:, None, :] + w[:, :, None] * (p1 - p0)[:, None, :]
    X = np.where(straddle, pts @ u, 0.0)
    Y = np.where(straddle, pts @ v, 0.0)
    cnt = straddle.sum(axis=0)
    safe = np.maximum(cnt, 1)
    cX = (X * straddle).sum(axis=0) / safe
    cY = (Y * straddle).sum(axis=0) / safe
    ang = np.where(straddle, np.arctan2(Y - cY, X - cX), np.inf)
    order = np.argsort(ang, axis=0)
    Xs = np.take_along_axis(X, order, axis=0)
    Ys = np.take_along_axis(Y, order, axis=0)
    ms = np.take_along_axis(straddle, order, axis=0)
    # invalid slots sort last; overwrite them with the first (valid) point so
    # they contribute nothing to the shoelace sum
    Xs = np.where(ms, Xs, Xs[0])
    Ys = np.where(ms, Ys, Ys[0])
    area = 0.5 * np.abs(
        (Xs * np.roll(Ys, -1, axis=0) - np.roll(Xs, -1, axis=0) * Ys).sum(axis=0)
    )
    return np.where(cnt >= 3, area, 0.0)


def _staircase_eval_loop(points, M, b, coefs, dirs, k):
    N = points.shape[0]
    m = b.shape[0]
    n = points.shape[1]
    T = coefs.shape[0]
    out = np.empty((N, m))
    for p in range(N):
        for i in range(m):
            acc = b[i]
            for j in range(n):
                acc += M[i, j] * points[p, j]
            out[p, i] = acc
        for t in range(T):
            proj = 0.0
            for j in range(n):
                proj += dirs[t, j] * points[p, j]
            s = np.floor(k * proj) / k
            for i in range(m):
                out[p, i] += coefs[t, i] * s
    return out


_staircase_eval_jit = maybe_njit(_staircase_eval_loop)


def staircase_eval_numpy(points, M, b, coefs, dirs, k):
    out = points @ M.T + b
    if coefs.shape[0]:
        steps = np.floor(k * (points @ dirs.T)) / k
        out = out + steps @ coefs
    return out


def _points_in_simplex_loop(points, v0, invT, tol):
    N = points.shape[0]
    n = points.shape[1]
    out = np.empty(N, dtype=np.bool_)
    for p in range(N):
        ssum = 0.0
        ok = True
        for i in range(n):
            c = 0.0
            for j in range(n):
                c += invT[i, j] * (points[p, j] - v0[j])
            if c < -tol:
                ok = False
                break
            ssum += c
        out[p] = ok and ssum <= 1.0 + tol
    return out


_points_in_simplex_jit = maybe_njit(_points_in_simplex_loop)


def points_in_simplex_numpy(points, v0, invT, tol):
    bary = (points - v0) @ invT.T
    return (bary >= -tol).all(axis=1) & (bary.sum(axis=1) <= 1.0 + tol)


def tri_slice_lengths(verts, d, offsets):
    """Lengths of triangle ∩ {x·d = offset} for a batch of offsets (n=2)."""
    verts = np.ascontiguousarray(verts, dtype=np.float64)
    d = np.ascontiguousarray(d, dtype=np.float64)
    offsets = np.ascontiguousarray(offsets, dtype=np.float64)
    if HAS_NUMBA:
        return _tri_slice_lengths_jit(verts, d, offsets)
    return tri_slice_lengths_numpy(verts, d, offsets)


def tet_slice_areas(verts, d, offsets):
    """Areas of tetrahedron ∩ {x·d = offset} for a batch of offsets (n=3)."""
    verts = np.ascontiguousarray(verts, dtype=np.float64)
    d = np.ascontiguousarray(d, dtype=np.float64)
    offsets = np.ascontiguousarray(offsets, dtype=np.float64)
    u, v = _plane_frame(d)
    if HAS_NUMBA:
        return _tet_slice_areas_jit(verts, d, offsets, _TET_E0, _TET_E1, u, v)
    return tet_slice_areas_numpy(verts, d, offsets, _TET_E0, _TET_E1, u, v)


def staircase_eval(points, M, b, coefs, dirs, k):
    """Evaluate affine-plus-staircase fields at a batch of points."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    M = np.ascontiguousarray(M, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    coefs = np.ascontiguousarray(coefs, dtype=np.float64)
    dirs = np.ascontiguousarray(dirs, dtype=np.float64)
    if HAS_NUMBA:
        return _staircase_eval_jit(points, M, b, coefs, dirs, float(k))
    return staircase_eval_numpy(points, M, b, coefs, dirs, float(k))


def points_in_simplex(points, v0, invT, tol=1e-12):
    """Barycentric membership test for a batch of points."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    v0 = np.ascontiguousarray(v0, dtype=np.float64)
    invT = np.ascontiguousarray(invT, dtype=np.float64)
    if HAS_NUMBA:
        return _points_in_simplex_jit(points, v0, invT, float(tol))
    return points_in_simplex_numpy(points, v0, invT, float(tol))


def warm_up():
    """Trigger JIT compilation of all kernels on tiny inputs."""
    tri = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    tri_slice_lengths(tri, np.array([1.0, 0.0]), np.array([0.5]))
    tet = np.array(
        [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    )
    tet_slice_areas(tet, np.array([1.0, 0.0, 0.0]), np.array([0.25]))
    staircase_eval(
        np.array([[0.3, 0.6]]),
        np.zeros((2, 2)),
        np.zeros(2),
        np.array([[1.0, 0.0]]),
        np.array([[1.0, 0.0]]),
        4,
    )
    points_in_simplex(np.array([[0.2, 0.2]]), tri[0], np.linalg.inv(tri[1:] - tri[0]).T)
