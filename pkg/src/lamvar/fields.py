"""Builtin vector fields and the piecewise-affine field JSON schema.

A field spec is either a builtin name, a dict, or a path to a JSON file
shaped like ``{"n":.., "m":.., "mesh": {"box": [[..],[..]],
"subdivisions": s}, "cells": [{"A": [[..]], "b": [..]}, ..]}`` with cells in
the mesh's canonical order, or ``{"builtin": "name"}``.
"""

from __future__ import annotations

import dataclasses
import json
import os

import numpy as np

from .geometry import PiecewiseAffineField, Triangulation, freudenthal_mesh, interpolate

UNIT2 = ((0.0, 0.0), (1.0, 1.0))
UNIT3 = ((0.0, 0.0, 0.0), (1.0, 1.0, 1.0))


@dataclasses.dataclass(frozen=True)
class BuiltinField:
    name: str
    n: int
    m: int
    box: tuple
    default_subdivisions: int
    note: str

    def fn(self, seed=0):
        raise NotImplementedError


@dataclasses.dataclass(frozen=True)
class _FixedField(BuiltinField):
    func: object = None

    def fn(self, seed=0):
        return self.func


@dataclasses.dataclass(frozen=True)
class _RandomAffineField(BuiltinField):
    def fn(self, seed=0):
        rng = np.random.default_rng(seed)
        A = rng.standard_normal((self.m, self.n))
        b = rng.standard_normal(self.m)
        return lambda x: A @ x + b


def _sinusoid(x):
    return np.array([np.sin(x[1]), np.sin(x[0])]) / 2.0


BUILTINS = {
    "identity2d": _FixedField(
        "identity2d", 2, 2, UNIT2, 1,
        "u(x) = x; symmetric-Schatten target 2, nuclear target 2",
        func=lambda x: np.asarray(x, dtype=np.float64),
    ),
    "identity3d": _FixedField(
        "identity3d", 3, 3, UNIT3, 1,
        "u(x) = x in 3d; symmetric-Schatten target 3, nuclear target 3",
        func=lambda x: np.asarray(x, dtype=np.float64),
    ),
    "skew2d": _FixedField(
        "skew2d", 2, 2, UNIT2, 1,
        "rigid rotation gradient; symmetric-Schatten target 0, nuclear target 2",
        func=lambda x: np.array([x[1], -x[0]]),
    ),
    "rankone-sym2d": _FixedField(
        "rankone-sym2d", 2, 2, UNIT2, 1,
        "gradient diag(1, -1); symmetric-Schatten target sqrt(2), nuclear target 2",
        func=lambda x: np.array([x[0], -x[1]]),
    ),
    "sinusoid2d": _FixedField(
        "sinusoid2d", 2, 2, UNIT2, 16,
        "u(x) = (sin x2, sin x1)/2; targets by quadrature",
        func=_sinusoid,
    ),
    "affine-random": _RandomAffineField(
        "affine-random", 2, 2, UNIT2, 4,
        "seeded random affine map; targets are the matrix norms of its gradient",
    ),
}


def field_to_json(field: PiecewiseAffineField) -> dict:
    mesh = field.mesh
    return {
        "n": field.n,
        "m": field.m,
        "mesh": {
            "box": mesh.box.tolist(),
            "subdivisions": int(mesh.subdivisions),
        },
        "cells": [
            {"A": field.A[i].tolist(), "b": field.b[i].tolist()}
            for i in range(mesh.n_cells)
        ],
    }


def field_from_json(data) -> tuple[Triangulation, PiecewiseAffineField]:
    mesh = freudenthal_mesh(
        np.array(data["mesh"]["box"], dtype=np.float64),
        int(data["mesh"]["subdivisions"]),
    )
    cells = data["cells"]
    if len(cells) != mesh.n_cells:
        raise ValueError(
            f"field file lists {len(cells)} cells, mesh has {mesh.n_cells}"
        )
    m = int(data["m"])
    n = int(data["n"])
    if n != mesh.dim:
        raise ValueError("field ambient dimension does not match its mesh")
    A = np.empty((mesh.n_cells, m, n))
    b = np.empty((mesh.n_cells, m))
    for i, cell in enumerate(cells):
        Ai = np.array(cell["A"], dtype=np.float64)
        bi = np.array(cell["b"], dtype=np.float64)
        if Ai.shape != (m, n) or bi.shape != (m,):
            raise ValueError(f"cell {i} has wrong A/b shape")
        A[i] = Ai
        b[i] = bi
    if not (np.isfinite(A).all() and np.isfinite(b).all()):
        raise ValueError("field data must be finite")
    return mesh, PiecewiseAffineField(mesh=mesh, A=A, b=b, continuous=False)


def resolve_field(spec, subdivisions=None, box=None, seed=0):
    """Materialize a field spec into (mesh, piecewise field, name).

    Builtin names interpolate the named function on a Kuhn mesh of the
    builtin's box (overridable); dicts and file paths load the JSON schema.
    """
    if isinstance(spec, str) and spec in BUILTINS:
        builtin = BUILTINS[spec]
        domain = np.array(box if box is not None else builtin.box, dtype=np.float64)
        subdiv = int(subdivisions) if subdivisions else builtin.default_subdivisions
        mesh = freudenthal_mesh(domain, subdiv)
        return mesh, interpolate(builtin.fn(seed=seed), mesh), builtin.name
    if isinstance(spec, str):
        if not os.path.exists(spec):
            raise ValueError(f"unknown builtin or missing field file: {spec!r}")
        with open(spec, "r", encoding="utf-8") as fh:
            spec = json.load(fh)
    if isinstance(spec, dict):
        if "builtin" in spec:
            return resolve_field(spec["builtin"], subdivisions, box, seed)
        mesh, field = field_from_json(spec)
        return mesh, field, "custom"
    raise TypeError("field spec must be a name, a path, or a dict")
