"""Referential event graphs and temporal concept-role reasoning."""

__version__ = "0.1.0"

from .amr import (
    AmrEdge,
    AmrGraph,
    AmrNode,
    PenmanParseError,
    SyntaxAnnotation,
    Token,
    invert_role,
    parse_penman,
    serialize_penman,
)
from .reg import (
    Reg,
    ReasoningSchedule,
    acyclize,
    build_reg,
    compute_refer_depths,
    reroot,
    select_referent_concept,
    select_referent_token,
    topological_schedule,
    validate,
)

__all__ = [
    "__version__",
    "AmrEdge",
    "AmrGraph",
    "AmrNode",
    "PenmanParseError",
    "SyntaxAnnotation",
    "Token",
    "invert_role",
    "parse_penman",
    "serialize_penman",
    "Reg",
    "ReasoningSchedule",
    "acyclize",
    "build_reg",
    "compute_refer_depths",
    "reroot",
    "select_referent_concept",
    "select_referent_token",
    "topological_schedule",
    "validate",
]
