"""Matrix norms on small dense matrices.

Frobenius, Schatten-1 (nuclear), Schatten-infinity, the symmetric Schatten-1
norm on symmetric matrices, and the divergence-constrained norm. All
spectral computations run through :func:`sym_eigen` / :func:`polar_decompose`
so snapping and ordering conventions are shared package-wide.
"""

from __future__ import annotations

import dataclasses

import numpy as np

#: eigen/singular values with |value| <= SNAP_TOL * (1 + ||A||_F) are snapped
#: to zero before any sign-based branching
SNAP_TOL = 1e-12


def _as_matrix(A):
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise ValueError(f"expected a 2-d matrix, got shape {A.shape}")
    if not np.isfinite(A).all():
        raise ValueError("matrix entries must be finite")
    return A


def _as_symmetric(A):
    A = _as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.allclose(A, A.T, rtol=0.0, atol=1e-10 * (1.0 + np.abs(A).max())):
        raise ValueError("matrix is not symmetric")
    return 0.5 * (A + A.T)


def snap_small(values, scale):
    """Zero out values within SNAP_TOL * (1 + scale); stabilizes sign branches."""
    values = np.array(values, dtype=np.float64)
    values[np.abs(values) <= SNAP_TOL * (1.0 + scale)] = 0.0
    return values


@dataclasses.dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (ascending, snapped) and orthonormal eigenvectors (columns)."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self):
        return (self.vectors * self.values) @ self.vectors.T


def sym_eigen(A) -> Spectrum:
    A = _as_symmetric(A)
    vals, vecs = np.linalg.eigh(A)
    vals = snap_small(vals, float(np.linalg.norm(A)))
    return Spectrum(values=vals, vectors=vecs)


@dataclasses.dataclass(frozen=True)
class PolarFactors:
    """A = R @ U with U = sqrt(AᵀA) PSD; R is a partial isometry on the row space.

    ``singular_values`` are snapped and paired with the right singular vectors
    (columns of ``right_vectors``). For rank-deficient A, the columns of R are
    orthonormal only on the span of the nonzero singular directions.
    """

    R: np.ndarray
    U: np.ndarray
    singular_values: np.ndarray
    right_vectors: np.ndarray


def polar_decompose(A) -> PolarFactors:
    A = _as_matrix(A)
    Uf, s, Vt = np.linalg.svd(A, full_matrices=False)
    s = snap_small(s, float(np.linalg.norm(A)))
    R = Uf @ Vt
    U = (Vt.T * s) @ Vt
    return PolarFactors(R=R, U=U, singular_values=s, right_vectors=Vt.T)


def frobenius(A) -> float:
    """sqrt of the sum of squared entries."""
    return float(np.linalg.norm(_as_matrix(A)))


def schatten1(A) -> float:
    """Sum of singular values (nuclear norm)."""
    A = _as_matrix(A)
    s = snap_small(np.linalg.svd(A, compute_uv=False), float(np.linalg.norm(A)))
    return float(s.sum())


def schatten_inf(A) -> float:
    """Largest singular value (spectral norm)."""
    A = _as_matrix(A)
    return float(np.linalg.svd(A, compute_uv=False).max())


def ssym(A) -> float:
    """Symmetric Schatten-1 norm of a symmetric matrix.

    Evaluates both equivalent forms, sqrt(1/2*(sum|eig|)^2 + 1/2*tr^2) and
    the split form sqrt((sum of nonpositive eigs)^2 + (sum of positive
    eigs)^2), and cross-checks them to 1e-10 relative before returning.
    """
    spec = sym_eigen(A)
    lam = spec.values
    abs_sum = float(np.abs(lam).sum())
    tr = float(lam.sum())
    by_def = np.sqrt(0.5 * abs_sum * abs_sum + 0.5 * tr * tr)
    neg = float(lam[lam <= 0.0].sum())
    pos = float(lam[lam > 0.0].sum())
    by_split = np.sqrt(neg * neg + pos * pos)
    if abs(by_def - by_split) > 1e-10 * (1.0 + abs(by_split)):
        raise ArithmeticError(
            f"ssym forms disagree: {by_def!r} vs {by_split!r}"
        )
    return float(by_split)


def ssym_2d(A) -> float:
    """Closed 2x2 form sqrt(|A|^2 + 2*(det A)+), no eigensolve."""
    A = _as_symmetric(A)
    if A.shape[0] != 2:
        raise ValueError("ssym_2d requires a 2x2 matrix")
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    return float(np.sqrt(float(np.linalg.norm(A)) ** 2 + 2.0 * max(det, 0.0)))


def div_norm(A) -> float:
    """Norm dual to the divergence-free wave cone, n in {2, 3}.

    For n=2 this equals the Schatten-1 norm. The n=3 formula (with
    eigenvalues ordered by magnitude |l1| <= |l2| <= |l3|, it is
    sqrt((|l1|+|l2|)^2 + l3^2) when |l1|+|l2| <= |l3| and otherwise
    (1/sqrt(2))(|l1|+|l2|+|l3|)) is CONJECTURAL: the underlying density
    statement is an expectation, not a theorem, so treat n=3 values as
    exploratory.
    """
    A = _as_symmetric(A)
    n = A.shape[0]
    if n == 2:
        return schatten1(A)
    if n != 3:
        raise ValueError("div_norm supports n in {2, 3} only")
    lam = np.abs(sym_eigen(A).values)
    lam.sort()
    return div_norm_from_eigs(lam)


def div_norm_from_eigs(abs_eigs) -> float:
    """n=3 branch formula on |eigenvalues| sorted ascending."""
    a1, a2, a3 = float(abs_eigs[0]), float(abs_eigs[1]), float(abs_eigs[2])
    if a1 + a2 <= a3:
        return float(np.sqrt((a1 + a2) ** 2 + a3 * a3))
    return float((a1 + a2 + a3) / np.sqrt(2.0))
