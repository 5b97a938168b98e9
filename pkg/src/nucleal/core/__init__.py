"""Shared contracts: instance interface, law harness, reports, sampling."""

from nucleal.core.errors import (
    InvariantViolation,
    ParseError,
    ShapeMismatch,
    TraceClassError,
)
from nucleal.core.harness import (
    check_nuclear_axioms,
    check_param_trace_axioms,
    check_sliding,
    check_star_laws,
    check_trace_axioms,
    check_tracedness,
    derive_trace,
    find_nuclear_factorization,
)
from nucleal.core.instance import (
    CategoryInstance,
    FactorizationResult,
    NuclearStructure,
    TraceStructure,
)
from nucleal.core.report import AxiomReport
from nucleal.core.rng import Lcg

__all__ = [
    "AxiomReport",
    "CategoryInstance",
    "FactorizationResult",
    "InvariantViolation",
    "Lcg",
    "NuclearStructure",
    "ParseError",
    "ShapeMismatch",
    "TraceClassError",
    "TraceStructure",
    "check_nuclear_axioms",
    "check_param_trace_axioms",
    "check_sliding",
    "check_star_laws",
    "check_trace_axioms",
    "check_tracedness",
    "derive_trace",
    "find_nuclear_factorization",
]
