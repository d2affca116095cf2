"""tutte-atlas - Tutte polynomials of self-dual graph families, their zeros and limit sets."""

__version__ = "0.1.0"

from tutteatlas.config import Config
from tutteatlas.eigen import (
    Branch,
    classify_dominance,
    dominant,
    eigen_explicit,
    eigen_pair,
    pressure,
    pressure_limit,
    theorem3_region_check,
    verify_beraha_factorization,
)
from tutteatlas.errors import ComputationError, TutteAtlasError, ValidationError
from tutteatlas.exact_poly import BiPoly, ZPoly, eval_zpoly, is_symmetric, symmetric_to_z
from tutteatlas.graph_families import (
    FamilyId,
    SpectralForm,
    build_family_graph,
    cycle_multi_poly,
    family_poly,
    family_zpoly,
    spectral_form,
    triangle_strip_poly,
    wheel_poly,
)
from tutteatlas.limit_sets import (
    CurveSet,
    Plane,
    curve_distance,
    family_limit_set,
    z_to_v,
)
from tutteatlas.roots import RootSet, convergence_report, find_roots, roots_in_v
from tutteatlas.tutte_oracle import Multigraph, TutteOracle, canonical_key, tutte

__all__ = [
    "BiPoly",
    "Branch",
    "ComputationError",
    "Config",
    "CurveSet",
    "FamilyId",
    "Multigraph",
    "Plane",
    "RootSet",
    "SpectralForm",
    "TutteAtlasError",
    "TutteOracle",
    "ValidationError",
    "ZPoly",
    "build_family_graph",
    "canonical_key",
    "classify_dominance",
    "convergence_report",
    "curve_distance",
    "cycle_multi_poly",
    "dominant",
    "eigen_explicit",
    "eigen_pair",
    "eval_zpoly",
    "family_limit_set",
    "family_poly",
    "family_zpoly",
    "find_roots",
    "is_symmetric",
    "pressure",
    "pressure_limit",
    "roots_in_v",
    "spectral_form",
    "symmetric_to_z",
    "theorem3_region_check",
    "triangle_strip_poly",
    "tutte",
    "verify_beraha_factorization",
    "wheel_poly",
    "z_to_v",
]
