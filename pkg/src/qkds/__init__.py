"""Multi-agent modal logic QK^D_S: parser, model checker, expansion and a SAT-backed tableau."""

from .core import (
    X,
    And,
    Bottom,
    Box,
    Diamond,
    Exists,
    ForAll,
    Formula,
    Iff,
    Implies,
    Instance,
    Lit,
    Not,
    Or,
    Signature,
    Top,
    Var,
    mk_instance,
    to_nnf,
)
from .expansion import expand, expansion_size
from .justify import (
    JustifyReport,
    believed,
    has_inconsistent_instance,
    instance_consistent,
    justifiable,
    minimal_inconsistent_instances,
)
from .parser import Problem, parse_formula, parse_problem, render
from .semantics import KripkeModel, brute_force_sat, holds
from .tableau import Verdict, solve

__version__ = "0.1.0"

__all__ = [
    "And",
    "believed",
    "Bottom",
    "Box",
    "brute_force_sat",
    "Diamond",
    "Exists",
    "expand",
    "expansion_size",
    "ForAll",
    "Formula",
    "has_inconsistent_instance",
    "holds",
    "Iff",
    "Implies",
    "Instance",
    "instance_consistent",
    "justifiable",
    "JustifyReport",
    "KripkeModel",
    "Lit",
    "minimal_inconsistent_instances",
    "mk_instance",
    "Not",
    "Or",
    "parse_formula",
    "parse_problem",
    "Problem",
    "render",
    "Signature",
    "solve",
    "to_nnf",
    "Top",
    "Var",
    "Verdict",
    "X",
]
