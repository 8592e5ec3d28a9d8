"""Brute-force envelope oracle for the Schatten convexification identities.

The Schatten-1 norm is simultaneously (a) the support function of the
Schatten-infinity unit ball and (b) the minimal total Frobenius cost of a
rank-one decomposition; the symmetric Schatten-1 norm plays the same role for
symmetric rank-one splits. This module searches both sides numerically:
``dual_bound_s1`` maximizes A:X over sampled extreme points of the dual ball
(always including the analytic maximizer), and the ``envelope_upper_*``
routines minimize decomposition cost over random competitors (always
including the constructive decomposition). The sandwich pins the norm value
from both sides, making this the independent oracle for derived norm values.

Randomness comes from ``numpy.random.default_rng`` (PCG64) seeded explicitly;
trials are evaluated and reduced sequentially, so results for a given seed are
bit-reproducible and a longer run extends a shorter one prefix-wise.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .norms import frobenius
from .rankone import Decomposition, bd_decompose, bv_decompose


@dataclasses.dataclass
class EnvelopeEstimate:
    lower: float
    upper: float
    witness_decomposition: Decomposition | None = None
    witness_dual: np.ndarray | None = None


def _random_orthogonal(rng, n):
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def dual_bound_s1(A, samples, seed=0):
    """Best linear lower bound max A:X over the Schatten-infinity unit ball.

    Samples extreme points X = P Qᵀ (partial isometries from QR of Gaussian
    factors) and always includes the analytic maximizer built from the SVD of
    A, so the returned value equals schatten1(A) up to roundoff.
    """
    A = np.asarray(A, dtype=np.float64)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    m, n = A.shape
    U, s, Vt = np.linalg.svd(A)
    r = min(m, n)
    analytic = U[:, :r] @ Vt[:r, :]
    best = float(np.tensordot(A, analytic))
    witness = analytic
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        P = _random_orthogonal(rng, m)[:, :r]
        Q = _random_orthogonal(rng, n)[:, :r]
        X = P @ Q.T
        val = float(np.tensordot(A, X))
        if val > best:
            best = val
            witness = X
    est = EnvelopeEstimate(lower=best, upper=float("inf"), witness_dual=witness)
    return est.lower


def _basis_split_cost(A, Z, symmetric):
    """Cost of the exact split A = Σ (A z_i)⊗z_i (or ⊙ z_i), z_i orthonormal.

    Any orthonormal basis reconstructs A exactly; the cost is minimized at
    the singular (resp. eigen) basis, so these competitors can match but
    never beat the Schatten value.
    """
    AZ = A @ Z
    cost = 0.0
    for i in range(Z.shape[1]):
        if symmetric:
            cost += frobenius(0.5 * (np.outer(AZ[:, i], Z[:, i]) + np.outer(Z[:, i], AZ[:, i])))
        else:
            cost += float(np.linalg.norm(AZ[:, i])) * float(np.linalg.norm(Z[:, i]))
    return cost


def _residual_completion_cost(A, rng, symmetric):
    """Residual-completion generator: random pieces plus a rank-one residual.

    Draws one or two random rank-one pieces, then accepts the trial only when
    the residual A - Σ pieces is itself rank-one to 1e-10 (its cost is then
    the top singular value). Generic draws fail the rank test and are
    rejected (returns None), keeping reconstruction exact.
    """
    m, n = A.shape
    count = int(rng.integers(1, 3))
    total = np.zeros_like(A)
    cost = 0.0
    for _ in range(count):
        a = rng.standard_normal(m)
        b = a if symmetric and rng.random() < 0.5 else rng.standard_normal(n)
        scale = 0.5 * rng.random() * float(np.linalg.norm(A)) or 1.0
        a = a / np.linalg.norm(a) * scale
        b = b / np.linalg.norm(b)
        piece = 0.5 * (np.outer(a, b) + np.outer(b, a)) if symmetric else np.outer(a, b)
        total = total + piece
        cost += float(np.linalg.norm(piece))
    resid = A - total
    s = np.linalg.svd(resid, compute_uv=False)
    if s[1:].sum() > 1e-10 * (1.0 + float(np.linalg.norm(A))):
        return None
    return cost + float(s[0])


def envelope_upper_s1(A, trials, seed=0):
    """Minimal rank-one decomposition cost found; includes bv_decompose."""
    A = np.asarray(A, dtype=np.float64)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    m, n = A.shape
    constructive = bv_decompose(A)
    best = constructive.cost()
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        if rng.random() < 0.5:
            Z = _random_orthogonal(rng, n)
            cost = _basis_split_cost(A, Z, symmetric=False)
        else:
            cost = _residual_completion_cost(A, rng, symmetric=False)
        if cost is not None and cost < best:
            best = cost
    return float(best)


def envelope_upper_ssym(A, trials, seed=0):
    """Minimal symmetric rank-one decomposition cost found; includes bd_decompose."""
    A = np.asarray(A, dtype=np.float64)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    A = 0.5 * (A + A.T)
    n = A.shape[0]
    constructive = bd_decompose(A)
    best = constructive.cost()
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        if rng.random() < 0.5:
            Z = _random_orthogonal(rng, n)
            cost = _basis_split_cost(A, Z, symmetric=True)
        else:
            cost = _residual_completion_cost(A, rng, symmetric=True)
        if cost is not None and cost < best:
            best = cost
    return float(best)


def sandwich(A, samples=64, trials=64, seed=0):
    """Dual lower bound and decomposition upper bound for schatten1(A)."""
    A = np.asarray(A, dtype=np.float64)
    lower = dual_bound_s1(A, samples, seed=seed)
    upper = envelope_upper_s1(A, trials, seed=seed)
    est = EnvelopeEstimate(
        lower=lower, upper=upper, witness_decomposition=bv_decompose(A)
    )
    if est.lower > est.upper + 1e-7:
        raise ArithmeticError(f"envelope sandwich inverted: {lower!r} > {upper!r}")
    return est
