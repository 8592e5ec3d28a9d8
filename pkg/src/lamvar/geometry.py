"""Simplicial meshes, hyperplane slicing, and Lagrange interpolation.

Exact (n-1)-measures of simplex/hyperplane intersections for ambient
n in {2, 3} (edge-crossing segment length, polygon clipping plus shoelace);
higher n falls back to a stratified Monte-Carlo estimator and is flagged via
a warning. Meshes are Freudenthal/Kuhn subdivisions of axis-aligned boxes,
which tile exactly and give explicit shape-regularity constants.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
import warnings

import numpy as np

from . import kernels

#: vertices within VERTEX_TOL * scale of a hyperplane count as lying on it
VERTEX_TOL = 1e-12
#: relative offset nudge applied when a hyperplane hits a vertex
NUDGE = 1e-9


@dataclasses.dataclass(frozen=True)
class Simplex:
    """An n-simplex given by its n+1 vertices (rows)."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64)
        object.__setattr__(self, "vertices", v)
        npts, n = v.shape
        if npts != n + 1:
            raise ValueError(f"simplex in R^{n} needs {n + 1} vertices, got {npts}")
        scale = max(1.0, float(np.abs(v).max()))
        if abs(np.linalg.det(v[1:] - v[0])) <= 1e-14 * scale**self.dim:
            raise ValueError("degenerate simplex")

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def volume(self) -> float:
        d = self.vertices[1:] - self.vertices[0]
        return abs(float(np.linalg.det(d))) / math.factorial(self.dim)

    def centroid(self):
        return self.vertices.mean(axis=0)

    def edge_inverse(self):
        return np.linalg.inv((self.vertices[1:] - self.vertices[0]).T)

    def contains(self, points, tol=1e-12):
        points = np.atleast_2d(points)
        return kernels.points_in_simplex(
            points, self.vertices[0], self.edge_inverse(), tol
        )


def _polygon_area_3d(verts):
    rel = verts[1:] - verts[0]
    acc = np.zeros(3)
    for i in range(len(rel) - 1):
        acc += np.cross(rel[i], rel[i + 1])
    return 0.5 * float(np.linalg.norm(acc))


def _order_by_angle(verts, tol=1e-12):
    """Order coplanar points counterclockwise around their centroid."""
    verts = np.asarray(verts, dtype=np.float64)
    if verts.shape[1] == 2:
        u = np.array([1.0, 0.0])
        w = np.array([0.0, 1.0])
        normal = None
    else:
        rel = verts - verts.mean(axis=0)
        _, _, vt = np.linalg.svd(rel)
        u, w, normal = vt[0], vt[1], vt[2]
    c = verts.mean(axis=0)
    ang = np.arctan2((verts - c) @ w, (verts - c) @ u)
    return verts[np.argsort(ang, kind="stable")]


@dataclasses.dataclass(frozen=True)
class ConvexPolytope:
    """Carrier for slice results and mesh faces.

    Vertices are stored ordered for affine dimension d <= 2 (the only
    polytopes built at runtime: segments, triangles, clipped polygons).
    Extremality of every vertex is verified at construction: exactly for
    d <= 2, via a centroid-direction separation certificate for d == 3
    (sufficient; construction fails when it cannot certify). d >= 4 is not
    supported.
    """

    ambient: int
    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] != self.ambient:
            raise ValueError("vertex array must be (count, ambient)")
        d = self.affine_dim_of(v)
        if d > 3:
            raise ValueError("polytopes of affine dimension >= 4 are not supported")
        if d == 2 and len(v) > 2:
            v = _order_by_angle(v)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "_dim", d)
        self._check_extremality()

    @staticmethod
    def affine_dim_of(v):
        if len(v) <= 1:
            return 0
        rel = v[1:] - v[0]
        scale = max(1.0, float(np.abs(v).max()))
        return int(np.linalg.matrix_rank(rel, tol=1e-10 * scale))

    @property
    def dim(self) -> int:
        return self._dim

    def _check_extremality(self):
        v = self.vertices
        scale = max(1.0, float(np.abs(v).max()))
        if self._dim == 0:
            return
        if self._dim == 1:
            if len(v) != 2:
                raise ValueError("a segment must have exactly 2 vertices")
            return
        if self._dim == 2:
            c = v.mean(axis=0)
            m = len(v)
            for i in range(m):
                a = v[i] - v[i - 1]
                b = v[(i + 1) % m] - v[i]
                if self.ambient == 2:
                    cr = a[0] * b[1] - a[1] * b[0]
                else:
                    nrm = np.cross(v[1] - v[0], v[2] - v[0])
                    cr = float(np.cross(a, b) @ nrm)
                if cr <= 1e-12 * scale * scale:
                    raise ValueError("vertex is not extreme (collinear or reflex)")
            return
        # d == 3: certify each vertex by separation along v - centroid(others)
        for i in range(len(v)):
            others = np.delete(v, i, axis=0)
            direction = v[i] - others.mean(axis=0)
            nd = np.linalg.norm(direction)
            if nd == 0.0 or (v[i] @ direction / nd) <= (others @ direction / nd).max() + 1e-12 * scale:
                raise ValueError("cannot certify vertex extremality (d=3)")

    def measure(self) -> float:
        v = self.vertices
        if self._dim == 0:
            return 0.0
        if self._dim == 1:
            return float(np.linalg.norm(v[1] - v[0]))
        if self._dim == 2:
            if self.ambient == 2:
                x, y = v[:, 0], v[:, 1]
                return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)))
            return _polygon_area_3d(v)
        raise NotImplementedError("volume of 3-polytopes is not needed at runtime")

    def centroid(self):
        return self.vertices.mean(axis=0)


@dataclasses.dataclass(frozen=True)
class Triangulation:
    """Kuhn-subdivided box mesh: shared vertex array plus index cells."""

    vertices: np.ndarray
    cells: np.ndarray
    box: np.ndarray
    subdivisions: int
    delta: float
    regularity_c: float

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    @property
    def n_cells(self) -> int:
        return self.cells.shape[0]

    def cell(self, i) -> Simplex:
        return Simplex(self.vertices[self.cells[i]])

    def cell_vertices(self, i):
        return self.vertices[self.cells[i]]

    def volumes(self):
        out = np.empty(self.n_cells)
        for i in range(self.n_cells):
            d = self.cell_vertices(i)
            out[i] = abs(np.linalg.det(d[1:] - d[0])) / math.factorial(self.dim)
        return out

    def spacing(self):
        return (self.box[1] - self.box[0]) / self.subdivisions

    def interior_faces(self):
        """Shared facets as (vertex_ids, cell_minus, cell_plus, unit_normal).

        The normal points from cell_minus toward cell_plus; entries are
        sorted by vertex-id tuple for deterministic reduction order.
        """
        n = self.dim
        table = {}
        for ci in range(self.n_cells):
            ids = self.cells[ci]
            for drop in range(n + 1):
                key = tuple(sorted(np.delete(ids, drop)))
                table.setdefault(key, []).append(ci)
        faces = []
        for key in sorted(table):
            owners = table[key]
            if len(owners) != 2:
                continue
            ca, cb = sorted(owners)
            fv = self.vertices[list(key)]
            if n == 2:
                e = fv[1] - fv[0]
                nu = np.array([-e[1], e[0]])
            else:
                nu = np.cross(fv[1] - fv[0], fv[2] - fv[0])
            nu = nu / np.linalg.norm(nu)
            towards = self.cell_vertices(cb).mean(axis=0) - self.cell_vertices(ca).mean(axis=0)
            if float(nu @ towards) < 0.0:
                nu = -nu
            faces.append((key, ca, cb, nu))
        return faces

    def locate(self, points):
        """Cell index containing each point (clipped to the box).

        Kuhn cells admit closed-form lookup: cube from the integer part of
        the scaled coordinates, simplex from the descending order of the
        fractional parts.
        """
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        n = self.dim
        s = self.subdivisions
        rel = (points - self.box[0]) / self.spacing()
        cube = np.clip(np.floor(rel).astype(np.int64), 0, s - 1)
        frac = rel - cube
        perms = list(itertools.permutations(range(n)))
        rank = {p: i for i, p in enumerate(perms)}
        order = np.argsort(-frac, axis=1, kind="stable")
        lin = np.zeros(len(points), dtype=np.int64)
        for a in range(n):
            lin = lin * s + cube[:, a]
        pidx = np.fromiter(
            (rank[tuple(row)] for row in order), dtype=np.int64, count=len(points)
        )
        return lin * len(perms) + pidx


def freudenthal_mesh(box, subdivisions) -> Triangulation:
    """Kuhn/Freudenthal triangulation of an axis-aligned box.

    Each grid cube splits into n! simplexes (one per coordinate-order chain).
    ``delta`` is the cube diagonal and every cell satisfies
    vol >= c * delta^n with c = 1/(n! * sqrt(n)^n), recorded on the mesh.
    """
    box = np.asarray(box, dtype=np.float64)
    if box.shape[0] != 2:
        raise ValueError("box must be [[lo...], [hi...]]")
    n = box.shape[1]
    s = int(subdivisions)
    if s < 1:
        raise ValueError("subdivisions must be >= 1")
    if not np.all(box[1] > box[0]):
        raise ValueError("box must have positive extent on every axis")
    h = (box[1] - box[0]) / s
    axes = [np.linspace(box[0][a], box[1][a], s + 1) for a in range(n)]
    grids = np.meshgrid(*axes, indexing="ij")
    vertices = np.stack([g.ravel() for g in grids], axis=1)
    strides = np.array([(s + 1) ** (n - 1 - a) for a in range(n)], dtype=np.int64)
    perms = list(itertools.permutations(range(n)))
    cells = []
    for cube in itertools.product(range(s), repeat=n):
        base = int(np.dot(np.array(cube, dtype=np.int64), strides))
        for perm in perms:
            ids = [base]
            offset = np.zeros(n, dtype=np.int64)
            for axis in perm:
                offset[axis] += 1
                ids.append(base + int(np.dot(offset, strides)))
            cells.append(ids)
    delta = float(np.linalg.norm(box[1] - box[0]) / s)
    c = 1.0 / (math.factorial(n) * math.sqrt(n) ** n)
    return Triangulation(
        vertices=vertices,
        cells=np.array(cells, dtype=np.int64),
        box=box,
        subdivisions=s,
        delta=delta,
        regularity_c=c,
    )


@dataclasses.dataclass
class PiecewiseAffineField:
    """Per-cell affine data (A_i, b_i) on a triangulation."""

    mesh: Triangulation
    A: np.ndarray
    b: np.ndarray
    continuous: bool = False

    @property
    def m(self) -> int:
        return self.A.shape[1]

    @property
    def n(self) -> int:
        return self.A.shape[2]

    def eval_cell(self, i, points):
        return np.atleast_2d(points) @ self.A[i].T + self.b[i]


def interpolate(f, mesh: Triangulation) -> PiecewiseAffineField:
    """Lagrange interpolation of ``f`` at the mesh vertices.

    Returns the unique per-cell affine maps matching f on each cell's
    vertices; globally affine inputs are reproduced exactly (identical A_i).
    """
    values = np.array([np.asarray(f(v), dtype=np.float64) for v in mesh.vertices])
    if values.ndim == 1:
        values = values[:, None]
    if not np.isfinite(values).all():
        raise ValueError("field is not finite at every mesh vertex")
    m = values.shape[1]
    n = mesh.dim
    A = np.empty((mesh.n_cells, m, n))
    b = np.empty((mesh.n_cells, m))
    for i in range(mesh.n_cells):
        ids = mesh.cells[i]
        V = mesh.vertices[ids]
        F = values[ids]
        D = (V[1:] - V[0]).T
        G = (F[1:] - F[0]).T
        A[i] = G @ np.linalg.inv(D)
        b[i] = F[0] - A[i] @ V[0]
    return PiecewiseAffineField(mesh=mesh, A=A, b=b, continuous=True)


def _projection_scale(t):
    return max(1.0, float(np.abs(t).max()))


def nudge_offsets(t_vertices, offsets):
    """Shift offsets off any vertex by a fixed +1e-9 * directional extent.

    Slice measures are continuous in the offset, so measure-zero shifts do
    not change the variation integrals; the fixed sign makes the counting of
    facet-supporting hyperplanes deterministic (the cell on the positive side
    of the hyperplane counts it).
    """
    offsets = np.array(offsets, dtype=np.float64, copy=True)
    extent = float(t_vertices.max() - t_vertices.min())
    scale = _projection_scale(t_vertices)
    step = NUDGE * (extent if extent > 0.0 else scale)
    for _ in range(3):
        hit = (
            np.abs(t_vertices[:, None] - offsets[None, :]) <= VERTEX_TOL * scale
        ).any(axis=0)
        if not hit.any():
            break
        offsets[hit] += step
    return offsets


def slice_family(cell: Simplex, direction, offsets):
    """Exact slice measures for a batch of parallel hyperplanes (nudged)."""
    direction = np.asarray(direction, dtype=np.float64)
    offsets = np.asarray(offsets, dtype=np.float64)
    t = cell.vertices @ direction
    offsets = nudge_offsets(t, offsets)
    n = cell.dim
    if n == 2:
        return kernels.tri_slice_lengths(cell.vertices, direction, offsets)
    if n == 3:
        return kernels.tet_slice_areas(cell.vertices, direction, offsets)
    warnings.warn(
        "ambient dimension > 3: slice measures use the Monte-Carlo fallback",
        stacklevel=2,
    )
    return np.array(
        [slice_measure_mc(cell, direction, o, samples=200_000, seed=0) for o in offsets]
    )


def slice_measure(cell: Simplex, direction, offset) -> float:
    """(n-1)-measure of cell ∩ {x·direction = offset}.

    Exact for n in {2, 3}; offsets hitting a vertex are nudged by
    +1e-9 * (directional extent) first, so facet-supporting hyperplanes are
    measured from the positive side (full facet measure for the cell on the
    positive side, zero for the other).
    """
    direction = np.asarray(direction, dtype=np.float64)
    if abs(float(np.linalg.norm(direction)) - 1.0) > 1e-12:
        raise ValueError("direction must be a unit vector")
    return float(slice_family(cell, direction, np.array([float(offset)]))[0])


def slice_measure_mc(cell: Simplex, direction, offset, samples=1_000_000, seed=0) -> float:
    """Monte-Carlo slice measure: stratified-jitter sampling on the plane.

    Builds an orthonormal frame of the hyperplane, bounds the cell's shadow
    in that frame, and estimates the in-cell fraction with one jittered
    sample per stratum; the measure is fraction * patch area. Matches the
    exact slices to ~1e-3 relative at 1e6 samples.
    """
    direction = np.asarray(direction, dtype=np.float64)
    n = cell.dim
    q, _ = np.linalg.qr(np.column_stack([direction, np.eye(n)]))
    frame = q[:, 1:n]
    base = float(offset) * direction
    shadow = (cell.vertices - base) @ frame
    lo = shadow.min(axis=0) - 1e-9
    hi = shadow.max(axis=0) + 1e-9
    rng = np.random.default_rng(seed)
    d = n - 1
    per_axis = max(1, int(round(samples ** (1.0 / d))))
    grids = np.meshgrid(*[np.arange(per_axis)] * d, indexing="ij")
    corners = np.stack([g.ravel() for g in grids], axis=1).astype(np.float64)
    jitter = rng.random(corners.shape)
    unit = (corners + jitter) / per_axis
    y = lo + unit * (hi - lo)
    pts = base + y @ frame.T
    inside = kernels.points_in_simplex(pts, cell.vertices[0], cell.edge_inverse())
    patch = float(np.prod(hi - lo))
    return patch * float(inside.mean())


def coarea_sum(cell: Simplex, direction, spacing) -> float:
    """Riemann sum Σ_ℓ spacing * slice_measure(cell, direction, ℓ*spacing).

    Converges to vol(cell) as spacing → 0 with O(spacing) error.
    """
    direction = np.asarray(direction, dtype=np.float64)
    spacing = float(spacing)
    if spacing <= 0.0:
        raise ValueError("spacing must be positive")
    t = cell.vertices @ direction
    lo = math.floor(float(t.min()) / spacing) - 1
    hi = math.ceil(float(t.max()) / spacing) + 1
    offsets = np.arange(lo, hi + 1, dtype=np.float64) * spacing
    return spacing * float(slice_family(cell, direction, offsets).sum())


def _split_polygon(verts, direction, offset, scale):
    """Split a convex polygon (3D vertex loop) by a plane; returns both sides."""
    s = verts @ direction - offset
    tol = VERTEX_TOL * scale
    lo_side, hi_side = [], []
    m = len(verts)
    for i in range(m):
        j = (i + 1) % m
        si, sj = s[i], s[j]
        if si <= tol:
            lo_side.append(verts[i])
        if si >= -tol:
            hi_side.append(verts[i])
        if (si < -tol and sj > tol) or (si > tol and sj < -tol):
            w = si / (si - sj)
            p = verts[i] + w * (verts[j] - verts[i])
            lo_side.append(p)
            hi_side.append(p)
    return np.array(lo_side), np.array(hi_side)


def _polygon_pieces(face_verts, cut_planes, scale, cap):
    polys = [np.asarray(face_verts, dtype=np.float64)]
    for direction, offset in cut_planes:
        nxt = []
        for poly in polys:
            lo_side, hi_side = _split_polygon(poly, direction, offset, scale)
            for part in (lo_side, hi_side):
                if len(part) >= 3 and _polygon_area_3d(part) > 1e-15 * scale * scale:
                    nxt.append(part)
        polys = nxt
        if len(polys) > cap:
            return None
    return polys


def _polygon_centroid_3d(verts):
    c0 = verts[0]
    acc = np.zeros(3)
    total = 0.0
    for i in range(1, len(verts) - 1):
        tri = np.array([c0, verts[i], verts[i + 1]])
        a = 0.5 * float(np.linalg.norm(np.cross(tri[1] - tri[0], tri[2] - tri[0])))
        acc += a * tri.mean(axis=0)
        total += a
    if total == 0.0:
        return verts.mean(axis=0)
    return acc / total


def _face_cut_offsets(face_verts, cuts, nu, scale):
    """Cut planes from lattice families that cross the face transversally."""
    planes = []
    for direction, spacing in cuts:
        direction = np.asarray(direction, dtype=np.float64)
        if abs(abs(float(direction @ nu)) - 1.0) <= 1e-9:
            continue  # parallel to the face: never crosses it
        t = face_verts @ direction
        lo = math.floor(float(t.min()) / spacing)
        hi = math.ceil(float(t.max()) / spacing)
        for ell in range(lo, hi + 1):
            off = ell * spacing
            if t.min() + VERTEX_TOL * scale < off < t.max() - VERTEX_TOL * scale:
                planes.append((direction, off))
    return planes


def face_partition_integral(
    face: ConvexPolytope,
    cuts,
    jump_value,
    norm,
    nu,
    tensor_mode="sym",
    cap=100_000,
    mc_samples=200_000,
    seed=0,
) -> float:
    """Integrate norm(jump ⊙ ν) (or ⊗ ν) over a mesh face.

    ``cuts`` lists (direction, spacing) lattice families from both adjacent
    cells; the face is partitioned by every member hyperplane that crosses it
    so ``jump_value`` (point -> m-vector) is constant on each sub-cell and is
    evaluated at the sub-cell centroid. Exact for ambient n in {2, 3}; if the
    sub-cell count exceeds ``cap`` the integral falls back to Monte-Carlo
    sampling on the face and reports the standard error via a warning.
    """
    from .rankone import sym_tensor, tensor as outer_tensor

    nu = np.asarray(nu, dtype=np.float64)
    fv = face.vertices
    scale = max(1.0, float(np.abs(fv).max()))
    if face.dim != face.ambient - 1:
        raise ValueError("face must have codimension 1")

    def atom(point):
        jump = np.asarray(jump_value(point), dtype=np.float64)
        mat = sym_tensor(jump, nu) if tensor_mode == "sym" else outer_tensor(jump, nu)
        return norm(mat)

    if face.ambient == 2:
        p, q = fv[0], fv[1]
        length = float(np.linalg.norm(q - p))
        breaks = [0.0, 1.0]
        for direction, off in _face_cut_offsets(fv, cuts, nu, scale):
            tp = float(p @ direction)
            tq = float(q @ direction)
            w = (off - tp) / (tq - tp)
            if 1e-12 < w < 1.0 - 1e-12:
                breaks.append(w)
        breaks = sorted(breaks)
        total = 0.0
        for a, b in zip(breaks[:-1], breaks[1:]):
            if b - a <= 1e-15:
                continue
            mid = p + 0.5 * (a + b) * (q - p)
            total += atom(mid) * (b - a) * length
        return total

    planes = _face_cut_offsets(fv, cuts, nu, scale)
    polys = _polygon_pieces(fv, planes, scale, cap)
    if polys is None:
        rng = np.random.default_rng(seed)
        u = rng.random((mc_samples, 2))
        flip = u.sum(axis=1) > 1.0
        u[flip] = 1.0 - u[flip]
        base_tris = [
            np.array([fv[0], fv[i], fv[i + 1]]) for i in range(1, len(fv) - 1)
        ]
        areas = np.array([_polygon_area_3d(t) for t in base_tris])
        weights = areas / areas.sum()
        tri_idx = rng.choice(len(base_tris), size=mc_samples, p=weights)
        vals = np.empty(mc_samples)
        for s_i in range(mc_samples):
            tri = base_tris[tri_idx[s_i]]
            pt = tri[0] + u[s_i, 0] * (tri[1] - tri[0]) + u[s_i, 1] * (tri[2] - tri[0])
            vals[s_i] = atom(pt)
        total_area = float(areas.sum())
        mean = float(vals.mean())
        stderr = float(vals.std(ddof=1) / math.sqrt(mc_samples)) * total_area
        warnings.warn(
            f"face partition exceeded {cap} sub-cells; Monte-Carlo fallback, "
            f"standard error {stderr:.3e}",
            stacklevel=2,
        )
        return total_area * mean
    total = 0.0
    for poly in polys:
        area = _polygon_area_3d(poly)
        total += atom(_polygon_centroid_3d(poly)) * area
    return total
