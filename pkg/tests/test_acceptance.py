"""Acceptance gate: nine go/no-go checks at their stated tolerances.

Each test prints one summary line with the measured margins; the shared
pipeline runs (one per builtin field and mode combination) are computed once
per module.
"""

import math
import time

import numpy as np
import pytest

from lamvar.envelope import dual_bound_s1, envelope_upper_s1, envelope_upper_ssym
from lamvar.geometry import Simplex, coarea_sum, slice_measure, slice_measure_mc
from lamvar.norms import div_norm_from_eigs, schatten1, ssym
from lamvar.pipeline import ExperimentConfig, run_experiment, verify_counterexample
from lamvar.rankone import bd_decompose, bv_decompose

KS = (8, 16, 32, 64)


@pytest.fixture(scope="module")
def standard_runs():
    specs = {
        "identity2d_bd": ExperimentConfig(
            mode="bd", field="identity2d", subdivisions=1, ks=KS, mc_samples=20_000
        ),
        "identity2d_bv": ExperimentConfig(
            mode="bv", field="identity2d", subdivisions=1, ks=KS, mc_samples=20_000
        ),
        "sinusoid2d_bd": ExperimentConfig(
            mode="bd", field="sinusoid2d", ks=KS, mc_samples=20_000
        ),
        "rankone_sym2d_bd": ExperimentConfig(
            mode="bd", field="rankone-sym2d", subdivisions=1, ks=KS, mc_samples=20_000
        ),
        "skew2d_bd": ExperimentConfig(
            mode="bd", field="skew2d", subdivisions=1, ks=KS, mc_samples=20_000
        ),
        "affine_random_bv": ExperimentConfig(
            mode="bv", field="affine-random", ks=KS, mc_samples=20_000
        ),
        "identity3d_bd": ExperimentConfig(
            mode="bd", field="identity3d", subdivisions=1, ks=(4, 8), mc_samples=20_000
        ),
    }
    runs, timings = {}, {}
    for name, cfg in specs.items():
        start = time.perf_counter()
        runs[name] = run_experiment(cfg)
        timings[name] = time.perf_counter() - start
    return runs, timings


def test_criterion_1_counterexample_certified_in_time_budget():
    start = time.perf_counter()
    report = verify_counterexample(64, ks=(4, 8, 16, 32, 64))
    elapsed = time.perf_counter() - start
    final = report.bd_frobenius[-1]
    assert elapsed < 5.0
    assert abs(final - 2.0) <= 0.05
    assert final > math.sqrt(2.0) + 0.5
    print(
        f"criterion 1: k=64 frobenius variation {final:.6f} "
        f"(gap to 2: {2.0 - final:.4f}), {elapsed:.2f}s"
    )


def test_criterion_2_identity_error_decays_at_first_order(standard_runs):
    runs, _ = standard_runs
    table = runs["identity2d_bv"]
    final = table.var_schatten[-1]
    assert abs(final - 2.0) <= 0.05
    errs = np.array([abs(v - 2.0) for v in table.var_schatten])
    slope = float(np.polyfit(np.log(np.array(KS, dtype=float)), np.log(errs), 1)[0])
    assert -1.2 <= slope <= -0.8
    print(f"criterion 2: k=64 value {final:.6f}, error slope {slope:.3f}")


def test_criterion_3_sinusoid_matches_quadrature(standard_runs):
    runs, timings = standard_runs
    table = runs["sinusoid2d_bd"]
    # symmetrized gradient of (sin x2, sin x1)/2 has density
    # sqrt(2) |cos x1 + cos x2| / 4 under the symmetric Schatten norm
    grid = (np.arange(1000) + 0.5) / 1000.0
    X, Y = np.meshgrid(grid, grid, indexing="ij")
    quad = float(np.mean(math.sqrt(2.0) * np.abs(np.cos(X) + np.cos(Y)) / 4.0))
    rel = abs(table.var_schatten[-1] - quad) / quad
    assert rel <= 0.03
    assert timings["sinusoid2d_bd"] < 60.0
    print(
        f"criterion 3: variation {table.var_schatten[-1]:.6f} vs quadrature "
        f"{quad:.6f} ({100 * rel:.2f}%), {timings['sinusoid2d_bd']:.1f}s"
    )


def test_criterion_4_decomposition_costs_equal_norms():
    rng = np.random.default_rng(404)
    worst_cost = 0.0
    worst_recon = 0.0
    for i in range(500):
        n = 2 + i % 4
        M = rng.standard_normal((n, n))
        A = 0.5 * (M + M.T)
        dec = bd_decompose(A)
        scale = 1.0 + float(np.abs(A).max())
        worst_cost = max(worst_cost, abs(dec.cost() - ssym(A)) / max(1.0, ssym(A)))
        worst_recon = max(worst_recon, float(np.abs(dec.reconstruct() - A).max()) / scale)
    assert worst_cost <= 1e-9
    assert worst_recon <= 1e-10
    worst_bv = 0.0
    for i in range(500):
        m = 2 + i % 4
        n = 2 + (i // 4) % 4
        A = rng.standard_normal((m, n))
        dec = bv_decompose(A)
        scale = 1.0 + float(np.abs(A).max())
        worst_bv = max(worst_bv, abs(dec.cost() - schatten1(A)) / max(1.0, schatten1(A)))
        worst_recon = max(worst_recon, float(np.abs(dec.reconstruct() - A).max()) / scale)
    assert worst_bv <= 1e-9
    assert worst_recon <= 1e-10
    print(
        f"criterion 4: worst cost error {max(worst_cost, worst_bv):.2e}, "
        f"worst reconstruction {worst_recon:.2e} over 1000 matrices"
    )


def test_criterion_5_envelope_search_never_beats_the_norms():
    rng = np.random.default_rng(2024)
    worst_gap = 0.0
    worst_undercut = 0.0
    for i in range(200):
        m = int(rng.integers(2, 4))
        n = int(rng.integers(2, 4))
        A = rng.standard_normal((m, n))
        lower = dual_bound_s1(A, 64, seed=i)
        upper = envelope_upper_s1(A, 1000, seed=i)
        worst_gap = max(worst_gap, abs(upper - lower) / max(1.0, upper))
        worst_undercut = max(worst_undercut, schatten1(A) - upper)
        S = rng.standard_normal((n, n))
        S = 0.5 * (S + S.T)
        up_sym = envelope_upper_ssym(S, 1000, seed=i)
        worst_undercut = max(worst_undercut, ssym(S) - up_sym)
    assert worst_gap <= 1e-8
    assert worst_undercut <= 1e-7
    print(
        f"criterion 5: worst sandwich gap {worst_gap:.2e}, "
        f"worst undercut {worst_undercut:.2e} over 200 matrices x 1000 trials"
    )


def test_criterion_6_slices_match_monte_carlo_and_coarea_rate():
    rng = np.random.default_rng(606)
    worst = 0.0
    count = 0
    while count < 50:
        n = int(rng.integers(2, 4))
        verts = rng.uniform(-1.0, 1.0, size=(n + 1, n))
        vol = abs(np.linalg.det(verts[1:] - verts[0]))
        if vol < (0.15 if n == 2 else 0.1):
            continue
        cell = Simplex(verts)
        d = rng.standard_normal(n)
        d /= np.linalg.norm(d)
        t = cell.vertices @ d
        off = float(
            rng.uniform(
                t.min() + 0.3 * (t.max() - t.min()),
                t.min() + 0.7 * (t.max() - t.min()),
            )
        )
        exact = slice_measure(cell, d, off)
        mc = slice_measure_mc(cell, d, off, samples=1_000_000, seed=count)
        worst = max(worst, abs(mc - exact) / exact)
        count += 1
    assert worst <= 1e-3

    tri = Simplex(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]))
    tri_errs = [
        abs(tri.volume() - coarea_sum(tri, np.array([1.0, 0.0]), 1.0 / k))
        for k in (8, 16, 32)
    ]
    tet = Simplex(
        np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    )
    tet_errs = [
        abs(tet.volume() - coarea_sum(tet, np.array([1.0, 0.0, 0.0]), 1.0 / k))
        for k in (8, 16, 32)
    ]
    for errs, lo, hi in ((tri_errs, 1.99, 2.01), (tet_errs, 1.8, 2.2)):
        for a, b in zip(errs, errs[1:]):
            assert lo <= a / b <= hi
    print(
        f"criterion 6: worst slice error {worst:.2e} over 50 slices; "
        f"coarea ratios {tri_errs[0] / tri_errs[1]:.3f}, {tet_errs[0] / tet_errs[1]:.3f}"
    )


def test_criterion_7_interface_share_stays_negligible(standard_runs):
    runs, _ = standard_runs
    details = []
    for name, table in runs.items():
        col = np.array(table.var_interface)
        if col.max() <= 1e-12:
            details.append(f"{name}: zero")
            continue
        slope = float(
            np.polyfit(np.log(np.array(table.ks, dtype=float)), np.log(col), 1)[0]
        )
        exponent = -slope
        assert 0.8 <= exponent <= 1.2, name
        share = col[-1] / table.var_schatten[-1]
        assert share < 0.02, name
        details.append(f"{name}: exponent {exponent:.2f}, share {100 * share:.2f}%")
    print("criterion 7: " + "; ".join(details))


def test_criterion_8_frobenius_equals_mode_norm_everywhere(standard_runs):
    runs, _ = standard_runs
    worst = 0.0
    for name, table in runs.items():
        for f, s in zip(table.var_frobenius, table.var_schatten):
            err = abs(f - s) / max(1.0, abs(s))
            worst = max(worst, err)
            assert err <= 1e-9, name
    print(f"criterion 8: worst frobenius vs mode-norm deviation {worst:.2e}")


def test_criterion_9_divergence_norm_branches_agree_on_boundary():
    rng = np.random.default_rng(909)
    worst = 0.0
    for _ in range(100):
        a, b = rng.uniform(0.1, 10.0, size=2)
        eigs = np.sort(np.array([a, b, a + b]))
        a1, a2, a3 = eigs
        sum_branch = math.sqrt((a1 + a2) ** 2 + a3**2)
        flat_branch = (a1 + a2 + a3) / math.sqrt(2.0)
        scale = max(1.0, a3)
        assert abs(sum_branch - flat_branch) <= 1e-10 * scale
        got = div_norm_from_eigs(eigs)
        worst = max(
            worst,
            abs(got - sum_branch) / scale,
            abs(got - flat_branch) / scale,
        )
    assert worst <= 1e-10
    print(f"criterion 9: worst branch disagreement {worst:.2e} over 100 triples")
