"""Moment-based detection of negative partial transposition in two-mode bosonic states."""

from . import criteria, moments, opalg, states
from .criteria import (
    OperatorBasis,
    Verdict,
    build_matrix,
    canonical_basis,
    det_d,
    det_s,
    determinant,
    duan,
    duan_min,
    hierarchy_scan,
    principal_minor_search,
    simon_S,
    two_term_condition,
)
from .errors import ContractError, DegreeError, PTWitnessError, SpecError, TruncationError
from .moments import MomentTable
from .opalg import MultiIndex, NormalPolynomial, enumerate_indices, monomial
from .states import FockState, StateSpec, build, min_eigenvalue, partial_transpose

__version__ = "0.1.0"
