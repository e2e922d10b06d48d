"""Contextuality analysis on atom graphs of quantum systems."""

from __future__ import annotations

__version__ = "0.1.0"

from .assign import (
    ZeroOneState,
    enumerate_01,
    find_01,
    is_ks_assignment,
    is_ks_contextual,
    ks_assignment_search,
)
from .catalog import BUILTIN_NAMES, builtin
from .classify import (
    AnalysisRefused,
    ClassificationReport,
    InequalitySpec,
    algebraic_bound,
    classify,
    eval_inequality,
    is_logically_contextual,
    is_maximally_contextual,
    is_noncontextual,
    is_strongly_contextual,
    ks_sisc_check,
    nc_bound,
    noncontextual_fraction,
)
from .linalg import DensityMatrix, Ket, Projector
from .scenario import (
    AtomGraph,
    Scenario,
    complete,
    find_isomorphism,
    from_graph,
    from_projectors,
    from_vectors,
    is_isomorphic,
    maximal_cliques,
    saturate,
    validate,
)
from .states import GraphState, induce, validate_state

__all__ = [
    "AnalysisRefused",
    "AtomGraph",
    "BUILTIN_NAMES",
    "ClassificationReport",
    "DensityMatrix",
    "GraphState",
    "InequalitySpec",
    "Ket",
    "Projector",
    "Scenario",
    "ZeroOneState",
    "algebraic_bound",
    "builtin",
    "classify",
    "complete",
    "enumerate_01",
    "eval_inequality",
    "find_01",
    "find_isomorphism",
    "from_graph",
    "from_projectors",
    "from_vectors",
    "induce",
    "is_isomorphic",
    "is_ks_assignment",
    "is_ks_contextual",
    "is_logically_contextual",
    "is_maximally_contextual",
    "is_noncontextual",
    "is_strongly_contextual",
    "ks_assignment_search",
    "ks_sisc_check",
    "maximal_cliques",
    "nc_bound",
    "noncontextual_fraction",
    "saturate",
    "validate",
    "validate_state",
]
