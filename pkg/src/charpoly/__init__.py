"""Exact characteristic polyhedra for ideals with marked variables (u; y).

The package computes projected Newton polyhedra of generator systems over
Q or a prime field, normalizes and prepares them at their vertices
(including the generalized face substitutions that replace completion
arguments), and reports directrix/ridge data and the distance measure
that certifies progress.  All arithmetic is exact.
"""

from .arith import (INFINITY, Frame, GF, PolyElement, QQ, exponent_of,
                    field_from_spec, field_spec, grlex_key, order_mod_u,
                    parse_poly, substitute_all_y, substitute_y)
from .errors import (BudgetExceededError, CharpolyError, DomainError,
                     InternalError, InvalidInputError, NotDissolvableError)
from .polyhedra import (FSubset, LinearForm, contains, delta_L, facets,
                        fsubset_from_points, is_vertex, lambda_measure,
                        point_order_key, qpoint)
from .forms import (GradedForm, MonomialValuation, effective_form, in_L,
                    in_nu, in_vertex, in_zero, is_effective, poly_of_element,
                    poly_of_pair, poly_of_system, v_L)
from .graded import (DirectrixResult, RidgeDirectrixReport, RidgeResult,
                     StdBasisReport, check_rid_eq_dir, check_standard_basis,
                     directrix, normalized_basis_signature, ridge)
from .prep import (Budget, PrepState, SolveWitness, apply_solution,
                   dissolve_generalized, face_initial_system,
                   is_normalized_at, normalize_at_vertex,
                   normalize_empty_case, prepare, vertex_normalize,
                   vertex_solvable)

__version__ = "0.1.0"

__all__ = [
    "INFINITY", "Frame", "GF", "PolyElement", "QQ", "exponent_of",
    "field_from_spec", "field_spec", "grlex_key", "order_mod_u",
    "parse_poly", "substitute_all_y", "substitute_y",
    "BudgetExceededError", "CharpolyError", "DomainError", "InternalError",
    "InvalidInputError", "NotDissolvableError",
    "FSubset", "LinearForm", "contains", "delta_L", "facets",
    "fsubset_from_points", "is_vertex", "lambda_measure", "point_order_key",
    "qpoint",
    "GradedForm", "MonomialValuation", "effective_form", "in_L", "in_nu",
    "in_vertex", "in_zero", "is_effective", "poly_of_element",
    "poly_of_pair", "poly_of_system", "v_L",
    "DirectrixResult", "RidgeDirectrixReport", "RidgeResult",
    "StdBasisReport", "check_rid_eq_dir", "check_standard_basis",
    "directrix", "normalized_basis_signature", "ridge",
    "Budget", "PrepState", "SolveWitness", "apply_solution",
    "dissolve_generalized", "face_initial_system", "is_normalized_at",
    "normalize_at_vertex", "normalize_empty_case", "prepare",
    "vertex_normalize", "vertex_solvable",
    "__version__",
]
