import math

import numpy as np
import pytest

from lamvar.geometry import (
    ConvexPolytope,
    Simplex,
    coarea_sum,
    face_partition_integral,
    freudenthal_mesh,
    interpolate,
    slice_family,
    slice_measure,
    slice_measure_mc,
)

UNIT_BOX_2D = np.array([[0.0, 0.0], [1.0, 1.0]])
UNIT_BOX_3D = np.array([[0.0, 0.0, 0.0], [1.0, 1.0, 1.0]])


def test_simplex_rejects_degenerate_and_miscounted():
    with pytest.raises(ValueError):
        Simplex(np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]))
    with pytest.raises(ValueError):
        Simplex(np.array([[0.0, 0.0], [1.0, 0.0]]))


def test_simplex_volume_and_contains():
    tri = Simplex(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    assert tri.volume() == pytest.approx(0.5, rel=1e-15)
    tet = Simplex(
        np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    )
    assert tet.volume() == pytest.approx(1.0 / 6.0, rel=1e-15)
    assert tri.contains(tri.centroid())[0]
    assert not tri.contains(np.array([0.8, 0.8]))[0]


def test_polytope_measures():
    seg = ConvexPolytope(2, np.array([[0.0, 0.0], [3.0, 4.0]]))
    assert seg.dim == 1
    assert seg.measure() == pytest.approx(5.0, rel=1e-15)
    square = ConvexPolytope(
        2, np.array([[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]])
    )
    assert square.dim == 2
    assert square.measure() == pytest.approx(1.0, rel=1e-14)
    planar = ConvexPolytope(
        3,
        np.array(
            [[0.0, 0.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 1.0], [0.0, 1.0, 1.0]]
        ),
    )
    assert planar.dim == 2
    assert planar.measure() == pytest.approx(1.0, rel=1e-14)


def test_polytope_rejects_nonextreme_vertices():
    # midpoint of an edge is not extreme
    with pytest.raises(ValueError):
        ConvexPolytope(
            2,
            np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.0]]),
        )
    tet = np.array(
        [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
    )
    ConvexPolytope(3, tet)  # extreme points certify
    with pytest.raises(ValueError):
        ConvexPolytope(3, np.vstack([tet, tet.mean(axis=0)]))


def test_polytope_rejects_high_dimension():
    verts = np.vstack([np.zeros(4), np.eye(4)])
    with pytest.raises(ValueError):
        ConvexPolytope(4, verts)


def test_mesh_counts_and_volumes():
    mesh = freudenthal_mesh(UNIT_BOX_2D, 3)
    assert mesh.n_cells == 2 * 9
    assert mesh.vertices.shape == (16, 2)
    assert mesh.volumes().sum() == pytest.approx(1.0, rel=1e-12)
    mesh3 = freudenthal_mesh(UNIT_BOX_3D, 2)
    assert mesh3.n_cells == 6 * 8
    assert mesh3.vertices.shape == (27, 3)
    assert mesh3.volumes().sum() == pytest.approx(1.0, rel=1e-12)


def test_mesh_shape_regularity():
    for box, n, s in [(UNIT_BOX_2D, 2, 2), (UNIT_BOX_3D, 3, 2)]:
        mesh = freudenthal_mesh(box, s)
        assert mesh.delta == pytest.approx(math.sqrt(n) / s, rel=1e-15)
        bound = mesh.regularity_c * mesh.delta**n
        assert mesh.volumes().min() >= bound * (1.0 - 1e-12)


def test_mesh_validation():
    with pytest.raises(ValueError):
        freudenthal_mesh(UNIT_BOX_2D, 0)
    with pytest.raises(ValueError):
        freudenthal_mesh(np.array([[0.0, 0.0], [1.0, 0.0]]), 1)
    with pytest.raises(ValueError):
        freudenthal_mesh(np.array([[0.0, 0.0]]), 1)


def test_locate_agrees_with_containment():
    rng = np.random.default_rng(3)
    for box, s in [(UNIT_BOX_2D, 3), (UNIT_BOX_3D, 2)]:
        mesh = freudenthal_mesh(box, s)
        pts = rng.uniform(box[0], box[1], size=(200, box.shape[1]))
        idx = mesh.locate(pts)
        assert (idx >= 0).all() and (idx < mesh.n_cells).all()
        for p, i in zip(pts, idx):
            assert mesh.cell(int(i)).contains(p, tol=1e-9)[0]


def test_locate_clips_to_box():
    mesh = freudenthal_mesh(UNIT_BOX_2D, 2)
    idx = mesh.locate(np.array([[-0.5, 0.5], [1.5, 1.5]]))
    assert (idx >= 0).all() and (idx < mesh.n_cells).all()


def test_interior_faces_counts_and_orientation():
    mesh = freudenthal_mesh(UNIT_BOX_2D, 1)
    faces = mesh.interior_faces()
    assert len(faces) == 1
    mesh2 = freudenthal_mesh(UNIT_BOX_2D, 2)
    assert len(mesh2.interior_faces()) == 8
    mesh3 = freudenthal_mesh(UNIT_BOX_3D, 1)
    assert len(mesh3.interior_faces()) == 6
    for m in (mesh, mesh2, mesh3):
        for key, ca, cb, nu in m.interior_faces():
            assert ca < cb
            assert set(key) <= set(m.cells[ca]) and set(key) <= set(m.cells[cb])
            assert np.linalg.norm(nu) == pytest.approx(1.0, rel=1e-12)
            towards = m.cell_vertices(cb).mean(axis=0) - m.cell_vertices(ca).mean(axis=0)
            assert float(nu @ towards) > 0.0


def test_interpolate_reproduces_affine_maps():
    A = np.array([[1.0, 2.0], [-0.5, 0.25]])
    b = np.array([0.1, -0.2])
    mesh = freudenthal_mesh(UNIT_BOX_2D, 3)
    field = interpolate(lambda x: A @ x + b, mesh)
    assert field.continuous
    assert np.abs(field.A - A).max() <= 1e-12
    assert np.abs(field.b - b).max() <= 1e-12
    pts = np.array([[0.37, 0.81]])
    idx = int(mesh.locate(pts)[0])
    assert np.allclose(field.eval_cell(idx, pts), pts @ A.T + b)


def test_interpolate_scalar_output_and_validation():
    mesh = freudenthal_mesh(UNIT_BOX_2D, 1)
    field = interpolate(lambda x: x[0], mesh)
    assert field.m == 1
    with pytest.raises(ValueError):
        interpolate(lambda x: np.inf, mesh)


def test_slice_measure_exact_values():
    tri = Simplex(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    assert slice_measure(tri, np.array([1.0, 0.0]), 0.25) == pytest.approx(
        0.75, rel=1e-12
    )
    tet = Simplex(
        np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    )
    assert slice_measure(tet, np.array([1.0, 0.0, 0.0]), 0.25) == pytest.approx(
        0.28125, rel=1e-12
    )


def test_slice_measure_requires_unit_direction():
    tri = Simplex(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    with pytest.raises(ValueError):
        slice_measure(tri, np.array([2.0, 0.0]), 0.25)


def test_facet_supporting_plane_counts_positive_side():
    # the facet {x = 0} belongs to the cell on the positive side of the plane
    plus = Simplex(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    minus = Simplex(np.array([[0.0, 0.0], [-1.0, 0.0], [0.0, 1.0]]))
    d = np.array([1.0, 0.0])
    assert slice_measure(plus, d, 0.0) == pytest.approx(1.0, abs=1e-6)
    assert slice_measure(minus, d, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_slice_family_matches_pointwise_measures():
    tet = Simplex(
        np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    )
    d = np.array([0.0, 1.0, 0.0])
    offsets = np.array([0.1, 0.4, 0.9])
    fam = slice_family(tet, d, offsets)
    single = [slice_measure(tet, d, o) for o in offsets]
    assert fam == pytest.approx(single, rel=1e-12)
    assert fam == pytest.approx([(1 - o) ** 2 / 2 for o in offsets], rel=1e-12)


def test_slice_measure_mc_matches_exact():
    tet = Simplex(
        np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    )
    d = np.array([1.0, 0.0, 0.0])
    exact = slice_measure(tet, d, 0.35)
    approx = slice_measure_mc(tet, d, 0.35, samples=200_000, seed=1)
    assert approx == pytest.approx(exact, rel=2e-3)


def test_slice_family_high_dimension_warns():
    cell = Simplex(np.vstack([np.zeros(4), np.eye(4)]))
    d = np.array([1.0, 0.0, 0.0, 0.0])
    with pytest.warns(UserWarning, match="Monte-Carlo"):
        out = slice_family(cell, d, np.array([0.3]))
    assert out[0] == pytest.approx((1 - 0.3) ** 3 / 6.0, rel=3e-2)


def test_coarea_sum_error_is_exactly_half_spacing():
    # for this triangle the Riemann sum undercounts by spacing/2 exactly
    tri = Simplex(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]))
    d = np.array([1.0, 0.0])
    errors = []
    for k in (4, 8, 16):
        total = coarea_sum(tri, d, 1.0 / k)
        err = tri.volume() - total
        assert err == pytest.approx(1.0 / (2 * k), abs=1e-6)
        errors.append(err)
    assert errors[0] / errors[1] == pytest.approx(2.0, rel=1e-3)
    assert errors[1] / errors[2] == pytest.approx(2.0, rel=1e-3)


def test_coarea_sum_validates_spacing():
    tri = Simplex(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]))
    with pytest.raises(ValueError):
        coarea_sum(tri, np.array([1.0, 0.0]), 0.0)


def test_face_integral_segment_piecewise_constant():
    face = ConvexPolytope(2, np.array([[0.0, 0.0], [0.0, 1.0]]))
    nu = np.array([1.0, 0.0])

    def jump(p):
        return np.array([4.0, 0.0]) if p[1] < 0.25 else np.array([1.0, 0.0])

    def frob(M):
        return float(np.linalg.norm(M))

    cuts = [(np.array([0.0, 1.0]), 0.25), (np.array([1.0, 0.0]), 0.5)]
    # second family is parallel to the face and must be ignored
    total = face_partition_integral(face, cuts, jump, frob, nu, tensor_mode="outer")
    assert total == pytest.approx(0.25 * 4.0 + 0.75 * 1.0, rel=1e-12)


def test_face_integral_square_sym_mode():
    face = ConvexPolytope(
        3,
        np.array(
            [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]]
        ),
    )
    nu = np.array([0.0, 0.0, 1.0])

    def jump(p):
        c = 1.0 if p[0] < 0.5 else 3.0
        return np.array([c, 0.0, 0.0])

    def frob(M):
        return float(np.linalg.norm(M))

    cuts = [(np.array([1.0, 0.0, 0.0]), 0.5)]
    total = face_partition_integral(face, cuts, jump, frob, nu)
    # |c e1 ⊙ e3| = c/sqrt(2), halves at c=1 and c=3
    assert total == pytest.approx((0.5 + 1.5) / math.sqrt(2.0), rel=1e-10)


def test_face_integral_monte_carlo_fallback():
    face = ConvexPolytope(
        3,
        np.array(
            [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]]
        ),
    )
    nu = np.array([0.0, 0.0, 1.0])

    def jump(p):
        c = 1.0 if p[0] < 0.5 else 3.0
        return np.array([c, 0.0, 0.0])

    def frob(M):
        return float(np.linalg.norm(M))

    cuts = [(np.array([1.0, 0.0, 0.0]), 0.5)]
    with pytest.warns(UserWarning, match="Monte-Carlo"):
        total = face_partition_integral(
            face, cuts, jump, frob, nu, cap=1, mc_samples=50_000
        )
    assert total == pytest.approx((0.5 + 1.5) / math.sqrt(2.0), rel=2e-2)


def test_face_integral_requires_codimension_one():
    seg = ConvexPolytope(3, np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0]]))
    with pytest.raises(ValueError):
        face_partition_integral(
            seg, [], lambda p: np.zeros(3), lambda M: 0.0, np.array([0.0, 0.0, 1.0])
        )
