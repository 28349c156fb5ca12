"""Exact computations for the geography of closed oriented 4-manifolds with
free abelian (and a few other) fundamental groups."""

from .classes import normal_form_5, normal_form_6, pairing_gram, triple_invariants
from .constructions import Block, evaluate, parse_recipe, projective_construction
from .errors import (
    ContradictionError,
    DomainError,
    GeographyError,
    InternalInconsistencyError,
    ParseError,
    RegressionMismatch,
    VerificationError,
)
from .exterior import BasisChange, KVector, gl_action, parse_kvector, wedge
from .forms import SymIntForm, invariants, parse_gram
from .geography import (
    GroupProfile,
    QFunction,
    assemble_q,
    builtin,
    derived_invariants,
    lower_bound,
    q_exact,
)
from .search import SearchSpec, run_search, verify_hit

__version__ = "0.1.0"

__all__ = [
    "normal_form_5",
    "normal_form_6",
    "pairing_gram",
    "triple_invariants",
    "Block",
    "evaluate",
    "parse_recipe",
    "projective_construction",
    "ContradictionError",
    "DomainError",
    "GeographyError",
    "InternalInconsistencyError",
    "ParseError",
    "RegressionMismatch",
    "VerificationError",
    "BasisChange",
    "KVector",
    "gl_action",
    "parse_kvector",
    "wedge",
    "SymIntForm",
    "invariants",
    "parse_gram",
    "GroupProfile",
    "QFunction",
    "assemble_q",
    "builtin",
    "derived_invariants",
    "lower_bound",
    "q_exact",
    "SearchSpec",
    "run_search",
    "verify_hit",
]
