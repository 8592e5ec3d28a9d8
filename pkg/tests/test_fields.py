import json

import numpy as np
import pytest

from lamvar.fields import (
    BUILTINS,
    field_from_json,
    field_to_json,
    resolve_field,
)


def test_builtin_registry_shapes():
    assert set(BUILTINS) == {
        "identity2d",
        "identity3d",
        "skew2d",
        "rankone-sym2d",
        "sinusoid2d",
        "affine-random",
    }
    assert BUILTINS["identity3d"].n == 3
    assert BUILTINS["sinusoid2d"].default_subdivisions == 16
    assert BUILTINS["affine-random"].default_subdivisions == 4
    for b in BUILTINS.values():
        assert b.note


def test_resolve_identity_builtin():
    mesh, field, name = resolve_field("identity2d")
    assert name == "identity2d"
    assert mesh.subdivisions == 1
    assert field.continuous
    assert np.abs(field.A - np.eye(2)).max() <= 1e-12
    assert np.abs(field.b).max() <= 1e-12


def test_resolve_skew_builtin_gradient():
    _, field, _ = resolve_field("skew2d", subdivisions=2)
    skew = np.array([[0.0, 1.0], [-1.0, 0.0]])
    assert np.abs(field.A - skew).max() <= 1e-12


def test_resolve_overrides_box_and_subdivisions():
    box = np.array([[-1.0, -1.0], [1.0, 1.0]])
    mesh, _, _ = resolve_field("identity2d", subdivisions=3, box=box)
    assert mesh.subdivisions == 3
    assert np.allclose(mesh.box, box)


def test_random_affine_builtin_is_seeded():
    _, f1, _ = resolve_field("affine-random", seed=5)
    _, f2, _ = resolve_field("affine-random", seed=5)
    _, f3, _ = resolve_field("affine-random", seed=6)
    assert np.allclose(f1.A, f2.A) and np.allclose(f1.b, f2.b)
    assert not np.allclose(f1.A, f3.A)
    # one global gradient: the interpolant of an affine map
    assert np.abs(f1.A - f1.A[0]).max() <= 1e-10


def test_json_round_trip():
    _, field, _ = resolve_field("sinusoid2d", subdivisions=2)
    data = field_to_json(field)
    mesh2, loaded = field_from_json(data)
    assert mesh2.n_cells == field.mesh.n_cells
    assert np.allclose(loaded.A, field.A)
    assert np.allclose(loaded.b, field.b)
    assert not loaded.continuous


def test_resolve_from_dict_path_and_builtin_key(tmp_path):
    _, field, _ = resolve_field("identity2d")
    data = field_to_json(field)
    _, loaded, name = resolve_field(data)
    assert name == "custom"
    assert np.allclose(loaded.A, field.A)

    path = tmp_path / "field.json"
    path.write_text(json.dumps(data))
    _, from_file, name = resolve_field(str(path))
    assert name == "custom"
    assert np.allclose(from_file.A, field.A)

    mesh, aliased, name = resolve_field({"builtin": "skew2d"})
    assert name == "skew2d"


def test_field_json_validation():
    _, field, _ = resolve_field("identity2d")
    data = field_to_json(field)

    bad = json.loads(json.dumps(data))
    bad["cells"] = bad["cells"][:1]
    with pytest.raises(ValueError, match="cells"):
        field_from_json(bad)

    bad = json.loads(json.dumps(data))
    bad["cells"][0]["A"] = [[1.0, 0.0]]
    with pytest.raises(ValueError, match="shape"):
        field_from_json(bad)

    bad = json.loads(json.dumps(data))
    bad["cells"][0]["b"] = [float("nan"), 0.0]
    with pytest.raises(ValueError, match="finite"):
        field_from_json(bad)

    bad = json.loads(json.dumps(data))
    bad["n"] = 3
    with pytest.raises(ValueError, match="dimension"):
        field_from_json(bad)


def test_resolve_rejects_unknown_specs():
    with pytest.raises(ValueError, match="unknown builtin"):
        resolve_field("no-such-field")
    with pytest.raises(TypeError):
        resolve_field(42)
