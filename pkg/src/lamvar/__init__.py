"""Matrix-norm variation of laminate fields: norms, decompositions, meshes.

The package computes exact total variations of staircase laminate
approximations to affine and piecewise-affine vector fields under the
Frobenius, nuclear (Schatten-1) and symmetric-Schatten norms, together with
the rank-one decompositions and slice geometry the constructions rest on.
"""

from .backend import HAS_NUMBA, backend_name
from .envelope import EnvelopeEstimate, dual_bound_s1, envelope_upper_s1, envelope_upper_ssym, sandwich
from .fields import BUILTINS, field_from_json, field_to_json, resolve_field
from .geometry import (
    ConvexPolytope,
    PiecewiseAffineField,
    Simplex,
    Triangulation,
    coarea_sum,
    face_partition_integral,
    freudenthal_mesh,
    interpolate,
    slice_measure,
    slice_measure_mc,
)
from .laminates import (
    StaircaseField,
    StaircaseTerm,
    VariationReport,
    build_bd_laminate,
    build_bv_laminate,
    step_eval,
    sup_error,
    trace_eval,
    variation_density,
    variation_on_cell,
)
from .norms import (
    PolarFactors,
    Spectrum,
    div_norm,
    div_norm_from_eigs,
    frobenius,
    polar_decompose,
    schatten1,
    schatten_inf,
    ssym,
    ssym_2d,
    sym_eigen,
)
from .pipeline import (
    ConvergenceTable,
    CounterexampleReport,
    ExperimentConfig,
    relaxation_estimate,
    run_experiment,
    verify_counterexample,
)
from .rankone import (
    Decomposition,
    RankOnePiece,
    bd_decompose,
    bv_decompose,
    sym_rank_one_factor,
    sym_tensor,
    tensor,
)

__version__ = "0.1.0"

__all__ = [
    "HAS_NUMBA",
    "backend_name",
    "EnvelopeEstimate",
    "dual_bound_s1",
    "envelope_upper_s1",
    "envelope_upper_ssym",
    "sandwich",
    "BUILTINS",
    "field_from_json",
    "field_to_json",
    "resolve_field",
    "ConvexPolytope",
    "PiecewiseAffineField",
    "Simplex",
    "Triangulation",
    "coarea_sum",
    "face_partition_integral",
    "freudenthal_mesh",
    "interpolate",
    "slice_measure",
    "slice_measure_mc",
    "StaircaseField",
    "StaircaseTerm",
    "VariationReport",
    "build_bd_laminate",
    "build_bv_laminate",
    "step_eval",
    "sup_error",
    "trace_eval",
    "variation_density",
    "variation_on_cell",
    "PolarFactors",
    "Spectrum",
    "div_norm",
    "div_norm_from_eigs",
    "frobenius",
    "polar_decompose",
    "schatten1",
    "schatten_inf",
    "ssym",
    "ssym_2d",
    "sym_eigen",
    "ConvergenceTable",
    "CounterexampleReport",
    "ExperimentConfig",
    "relaxation_estimate",
    "run_experiment",
    "verify_counterexample",
    "Decomposition",
    "RankOnePiece",
    "bd_decompose",
    "bv_decompose",
    "sym_rank_one_factor",
    "sym_tensor",
    "tensor",
    "__version__",
]
