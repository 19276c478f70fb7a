"""Quantifier elimination by finite conjunction/disjunction over instance ranges."""

from __future__ import annotations

from .core import (
    BINARY,
    Box,
    Diamond,
    Exists,
    ForAll,
    Formula,
    Not,
    conjoin,
    disjoin,
    instance_range,
    is_closed,
    range_size,
    substitute,
)
from .errors import OpenFormula


def expand(phi: Formula) -> Formula:
    """Equivalent quantifier-free formula without the variable modality.

    Innermost quantifiers go first, so each substitution only ever sees the
    free layer of x that belongs to the quantifier being eliminated.
    """
    if not is_closed(phi):
        raise OpenFormula("only closed formulas can be expanded")
    return _expand(phi)


def _expand(phi: Formula) -> Formula:
    match phi:
        case ForAll(lo, up, body):
            inner = _expand(body)
            return conjoin([substitute(inner, r) for r in instance_range(lo, up)])
        case Exists(lo, up, body):
            inner = _expand(body)
            return disjoin([substitute(inner, r) for r in instance_range(lo, up)])
        case Box(mod, sub):
            return Box(mod, _expand(sub))
        case Diamond(mod, sub):
            return Diamond(mod, _expand(sub))
        case Not(sub):
            return Not(_expand(sub))
    if isinstance(phi, BINARY):
        return type(phi)(_expand(phi.left), _expand(phi.right))
    return phi


def expansion_size(phi: Formula) -> int:
    """Node count of ``expand(phi)`` without building it.

    Substituting x by a constant does not change node counts, so a
    quantifier over k instances with an expanded body of m nodes becomes
    k copies joined by k - 1 binary nodes (one ``Top``/``Bottom`` if k = 0).
    """
    match phi:
        case ForAll(lo, up, body) | Exists(lo, up, body):
            k = range_size(lo, up)
            return 1 if k == 0 else k * expansion_size(body) + k - 1
        case Box(_, sub) | Diamond(_, sub) | Not(sub):
            return 1 + expansion_size(sub)
    if isinstance(phi, BINARY):
        return 1 + expansion_size(phi.left) + expansion_size(phi.right)
    return 1


def quantifier_ranges(phi: Formula) -> list[int]:
    """Range sizes of the quantifiers of ``phi`` in pre-order."""
    out: list[int] = []
    _ranges(phi, out)
    return out


def _ranges(phi, out):
    match phi:
        case ForAll(lo, up, body) | Exists(lo, up, body):
            out.append(range_size(lo, up))
            _ranges(body, out)
        case Box(_, sub) | Diamond(_, sub) | Not(sub):
            _ranges(sub, out)
    if isinstance(phi, BINARY):
        _ranges(phi.left, out)
        _ranges(phi.right, out)

