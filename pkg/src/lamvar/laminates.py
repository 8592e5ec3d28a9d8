"""Staircase laminate fields and their exact variation measures.

A laminate is an affine map plus finitely many terms c * s_k(d·x) where
s_k(t) = floor(k*t)/k. Its derivative is a jump measure concentrated on the
hyperplane families {d·x = l/k}, with jump c/k across each hyperplane, so
variations under any matrix norm reduce to closed-form sums of slice
measures. Two constructors realize a prescribed affine gradient: a
gradient-mode build from rank-one pieces of a polar decomposition, and a
symmetrized-gradient-mode build from symmetric rank-one pairs (the affine
part then carries the skew component).
"""

from __future__ import annotations

import dataclasses
import json
import math

import numpy as np

from . import kernels, qmc
from .geometry import Simplex, slice_family
from .norms import frobenius, schatten1, ssym
from .rankone import bd_decompose, bv_decompose, sym_tensor, tensor

#: hyperplane families with directions equal up to sign within this merge
DIRECTION_TOL = 1e-12
#: |sin(angle)| below this treats a symmetric pair as parallel (single term)
PARALLEL_TOL = 1e-10
#: |k*t - round(k*t)| below this counts as on-lattice for one-sided traces
LATTICE_TOL = 1e-9

NORMS = {"frobenius": frobenius, "schatten1": schatten1, "ssym": ssym}


def step_eval(k, t):
    """Staircase value floor(k*t)/k; satisfies s_k(t) <= t < s_k(t) + 1/k."""
    k = int(k)
    if k < 1:
        raise ValueError("k must be a positive integer")
    if np.isscalar(t):
        return math.floor(k * t) / k
    return np.floor(k * np.asarray(t, dtype=np.float64)) / k


@dataclasses.dataclass(frozen=True)
class StaircaseTerm:
    """One summand c * s_k(d·x): jump c/k across every {d·x = l/k}."""

    coefficient: np.ndarray
    direction: np.ndarray
    k: int

    def __post_init__(self):
        c = np.asarray(self.coefficient, dtype=np.float64)
        d = np.asarray(self.direction, dtype=np.float64)
        object.__setattr__(self, "coefficient", c)
        object.__setattr__(self, "direction", d)
        if not np.isfinite(c).all() or not np.isfinite(d).all():
            raise ValueError("term data must be finite")
        if abs(float(np.linalg.norm(d)) - 1.0) > 1e-12:
            raise ValueError("direction must be a unit vector (within 1e-12)")
        if int(self.k) < 1:
            raise ValueError("fineness k must be >= 1")
        object.__setattr__(self, "k", int(self.k))

    def jump(self):
        return self.coefficient / self.k


@dataclasses.dataclass(frozen=True)
class StaircaseField:
    """Affine part (M, b) plus staircase terms; mode 'bv' or 'bd'."""

    n: int
    m: int
    M: np.ndarray
    b: np.ndarray
    terms: tuple
    mode: str

    def __post_init__(self):
        M = np.asarray(self.M, dtype=np.float64)
        b = np.asarray(self.b, dtype=np.float64)
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.mode not in ("bv", "bd"):
            raise ValueError("mode must be 'bv' or 'bd'")
        if M.shape != (self.m, self.n) or b.shape != (self.m,):
            raise ValueError("affine part has wrong shape")
        for t in self.terms:
            if t.coefficient.shape != (self.m,) or t.direction.shape != (self.n,):
                raise ValueError("term shape mismatch")
        scale = 1.0 + float(np.abs(M).max()) if M.size else 1.0
        if self.mode == "bd":
            if self.m != self.n:
                raise ValueError("bd mode requires m == n")
            if float(np.abs(M + M.T).max()) > 1e-12 * scale:
                raise ValueError("bd affine part must be skew-symmetric")
        else:
            if float(np.abs(M).max()) > 0.0:
                raise ValueError("bv affine part must vanish")

    @property
    def sup_coefficient(self) -> float:
        """C with ||field - affine target||_sup <= C/k (k the shared fineness)."""
        return float(sum(np.linalg.norm(t.coefficient) for t in self.terms))

    def coarse_gradient(self):
        """The affine gradient this field laminates: M + sum c (x) d."""
        A = self.M.copy()
        for t in self.terms:
            A += np.outer(t.coefficient, t.direction)
        return A

    def eval(self, x):
        """Field value(s); accepts one point or a batch of rows."""
        x = np.asarray(x, dtype=np.float64)
        single = x.ndim == 1
        pts = np.atleast_2d(x)
        ks = sorted({t.k for t in self.terms})
        out = kernels.staircase_eval(
            pts,
            self.M,
            self.b,
            np.zeros((0, self.m)),
            np.zeros((0, self.n)),
            1,
        )
        for k in ks:
            sub = [t for t in self.terms if t.k == k]
            coefs = np.array([t.coefficient for t in sub])
            dirs = np.array([t.direction for t in sub])
            out = out + kernels.staircase_eval(
                pts, np.zeros((self.m, self.n)), np.zeros(self.m), coefs, dirs, k
            )
        return out[0] if single else out

    def to_json(self) -> str:
        payload = {
            "mode": self.mode,
            "n": self.n,
            "m": self.m,
            "M": self.M.tolist(),
            "b": self.b.tolist(),
            "terms": [
                {
                    "coefficient": t.coefficient.tolist(),
                    "direction": t.direction.tolist(),
                    "k": t.k,
                }
                for t in self.terms
            ],
        }
        return json.dumps(payload, indent=2)

    @staticmethod
    def from_json(text) -> "StaircaseField":
        data = json.loads(text) if isinstance(text, str) else text
        terms = tuple(
            StaircaseTerm(
                coefficient=np.array(t["coefficient"], dtype=np.float64),
                direction=np.array(t["direction"], dtype=np.float64),
                k=int(t["k"]),
            )
            for t in data["terms"]
        )
        return StaircaseField(
            n=int(data["n"]),
            m=int(data["m"]),
            M=np.array(data["M"], dtype=np.float64),
            b=np.array(data["b"], dtype=np.float64),
            terms=terms,
            mode=data["mode"],
        )


def build_bv_laminate(A, b, k) -> StaircaseField:
    """Laminate with gradient jumps realizing the full gradient A.

    One term per nonzero singular value: c = s_i * (R e_i), d = e_i from the
    polar factors of A; the sup distance to x -> Ax + b is at most
    sup_coefficient / k (which never exceeds |A|_F * sqrt(n) / k).
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    m, n = A.shape
    dec = bv_decompose(A)
    terms = []
    for piece in dec.pieces:
        nd = float(np.linalg.norm(piece.right))
        if nd == 0.0 or piece.is_zero():
            continue
        terms.append(
            StaircaseTerm(
                coefficient=piece.left * nd,
                direction=piece.right / nd,
                k=k,
            )
        )
    return StaircaseField(
        n=n, m=m, M=np.zeros((m, n)), b=b, terms=tuple(terms), mode="bv"
    )


def build_bd_laminate(A, b, k, spectrum=None) -> StaircaseField:
    """Laminate whose symmetrized gradient jumps realize sym(A).

    The skew part of A rides in the affine component; sym(A) is decomposed
    into symmetric rank-one pieces a (.) b', each emitting the pair of terms
    (a|b'|/2) s_k(b'·x/|b'|) + (b'|a|/2) s_k(a·x/|a|), collapsed to the single
    componentwise term when a and b' are parallel. ``spectrum`` overrides the
    eigendecomposition used (degeneracy experiments).
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("bd laminates need a square gradient")
    sym = 0.5 * (A + A.T)
    skew = A - sym
    dec = bd_decompose(sym, spectrum=spectrum)
    terms = []
    for piece in dec.pieces:
        if piece.is_zero():
            continue
        alpha = piece.left
        beta = piece.right
        na = float(np.linalg.norm(alpha))
        nb = float(np.linalg.norm(beta))
        sin_angle = 0.0
        if na > 0.0 and nb > 0.0:
            cos = float(alpha @ beta) / (na * nb)
            sin_angle = math.sqrt(max(0.0, 1.0 - min(1.0, abs(cos)) ** 2))
        if na == 0.0 or nb == 0.0:
            continue
        if sin_angle <= PARALLEL_TOL:
            d = beta / nb
            c = piece.matrix() @ d
            terms.append(StaircaseTerm(coefficient=c, direction=d, k=k))
        else:
            terms.append(
                StaircaseTerm(coefficient=alpha * nb / 2.0, direction=beta / nb, k=k)
            )
            terms.append(
                StaircaseTerm(coefficient=beta * na / 2.0, direction=alpha / na, k=k)
            )
    return StaircaseField(n=n, m=n, M=skew, b=b, terms=tuple(terms), mode="bd")


def aggregate_families(field: StaircaseField):
    """Group terms whose jump hyperplanes coincide.

    Terms share a family when their fineness matches and directions agree up
    to sign within 1e-12 (every constructor uses the offset lattice {l/k}, so
    equal k implies congruent lattices); a sign flip on the direction flips
    the coefficient. Coefficients add before any norm is applied.
    Returns a list of (direction, k, summed_coefficient).
    """
    groups = []
    for t in field.terms:
        placed = False
        for g in groups:
            d0, k0, c0 = g
            if k0 != t.k:
                continue
            if float(np.abs(d0 - t.direction).max()) <= DIRECTION_TOL:
                g[2] = c0 + t.coefficient
                placed = True
                break
            if float(np.abs(d0 + t.direction).max()) <= DIRECTION_TOL:
                g[2] = c0 - t.coefficient
                placed = True
                break
        if not placed:
            groups.append([t.direction.copy(), t.k, t.coefficient.copy()])
    return [(d, k, c) for d, k, c in groups if float(np.linalg.norm(c)) > 0.0]


def family_jump_matrix(direction, k, coefficient, mode):
    """Aggregated jump matrix across one hyperplane of the family."""
    if mode == "bd":
        return sym_tensor(coefficient / k, direction)
    return tensor(coefficient / k, direction)


def _resolve_norm(norm, mode):
    if callable(norm):
        return norm
    if norm not in NORMS:
        raise ValueError(f"unknown norm selector {norm!r}")
    if norm == "ssym" and mode == "bv":
        raise ValueError("ssym applies to symmetrized jumps only (bd mode)")
    return NORMS[norm]


def variation_on_cell(field: StaircaseField, cell: Simplex, norm) -> float:
    """Variation of the field's jump measure restricted to a cell.

    Sums norm(aggregated jump matrix) * slice_measure over every hyperplane
    of every family meeting the cell. Hyperplanes through a vertex or facet
    are nudged toward the positive side of the family direction, so a facet
    shared by two cells is counted by exactly one of them.
    """
    norm_fn = _resolve_norm(norm, field.mode)
    total = 0.0
    for direction, k, coefficient in aggregate_families(field):
        J = family_jump_matrix(direction, k, coefficient, field.mode)
        weight = norm_fn(J)
        if weight == 0.0:
            continue
        t = cell.vertices @ direction
        lo = math.floor(float(t.min()) * k) - 1
        hi = math.ceil(float(t.max()) * k) + 1
        offsets = np.arange(lo, hi + 1, dtype=np.float64) / k
        total += weight * float(slice_family(cell, direction, offsets).sum())
    return total


def variation_density(field: StaircaseField, norm) -> float:
    """Limit of variation_on_cell(cell)/vol(cell) as k -> infinity.

    Each family contributes norm(jump) * (slices per unit length) = the norm
    of its per-unit-volume jump density k * J.
    """
    norm_fn = _resolve_norm(norm, field.mode)
    total = 0.0
    for direction, k, coefficient in aggregate_families(field):
        J = family_jump_matrix(direction, k, coefficient, field.mode)
        total += k * norm_fn(J)
    return total


def trace_eval(field: StaircaseField, x, nu, side):
    """One-sided limit of the field at x approached from x + side*0+*nu.

    Off-lattice projections evaluate plainly; a projection on the lattice
    resolves by the sign of side * (d·nu): positive approaches keep the
    floor's right-continuous value, negative approaches take the value from
    just below. side must be +1 or -1.
    """
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    x = np.asarray(x, dtype=np.float64)
    nu = np.asarray(nu, dtype=np.float64)
    out = field.M @ x + field.b
    for t in field.terms:
        kt = t.k * float(t.direction @ x)
        r = round(kt)
        if abs(kt - r) <= LATTICE_TOL:
            dn = side * float(t.direction @ nu)
            if dn > LATTICE_TOL:
                s = r / t.k
            elif dn < -LATTICE_TOL:
                s = (r - 1) / t.k
            else:
                s = math.floor(kt) / t.k
        else:
            s = math.floor(kt) / t.k
        out = out + t.coefficient * s
    return out


def sup_error(field: StaircaseField, A, b, region: Simplex, samples=10_000, seed=0) -> float:
    """Sup-norm distance bound between the field and x -> Ax + b.

    Returns the analytic bound sum_t |c_t|/k_t; when samples > 0, also
    checks an empirical maximum over quasi-random points of the region
    against the bound and raises ArithmeticError if it is exceeded.
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    bound = float(
        sum(np.linalg.norm(t.coefficient) / t.k for t in field.terms)
    )
    if samples > 0:
        unit = qmc.halton(samples, region.dim)
        pts = qmc.simplex_points(region.vertices, unit)
        dev = field.eval(pts) - (pts @ A.T + b)
        empirical = float(np.linalg.norm(dev, axis=1).max())
        if empirical > bound + 1e-9 * (1.0 + bound):
            raise ArithmeticError(
                f"empirical sup error {empirical} exceeds analytic bound {bound}"
            )
    return bound


@dataclasses.dataclass(frozen=True)
class VariationReport:
    """Per-region variation summary under the standard norms."""

    k: int
    volume: float
    frobenius: float
    schatten1: float
    ssym: float | None
    interface: float
    sup_bound: float

    def __post_init__(self):
        entries = [self.volume, self.frobenius, self.schatten1, self.interface, self.sup_bound]
        if self.ssym is not None:
            entries.append(self.ssym)
        if any(e < 0.0 for e in entries):
            raise ValueError("report entries must be nonnegative")
        if self.frobenius > self.schatten1 * (1.0 + 1e-9) + 1e-12:
            raise ValueError("frobenius variation cannot exceed schatten1")
