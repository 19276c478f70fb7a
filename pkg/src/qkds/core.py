"""Signatures, instances and the formula syntax of QK^D_S.

Formulas are immutable trees of frozen dataclasses.  The derived
connectives (``Not``, ``And``, ``Or``, ``Iff``, ``Diamond``, ``Top``) are kept
as their own nodes so that printing reproduces what the user wrote; they are
only desugared by :func:`to_nnf`.  Negation normal form reuses the same node
classes, restricted to ``Lit``, ``Top``, ``Bottom``, ``And``, ``Or``, ``Box``,
``Diamond``, ``ForAll`` and ``Exists``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Optional, Sequence, Union

from .errors import EmptyInstance, UnknownAtom


@dataclass(frozen=True)
class Signature:
    """Ordered, duplicate-free list of atomic modalities."""

    atoms: tuple[str, ...]

    def __post_init__(self):
        atoms = tuple(self.atoms)
        object.__setattr__(self, "atoms", atoms)
        if not atoms:
            raise ValueError("a signature needs at least one atom")
        if len(set(atoms)) != len(atoms):
            raise ValueError(f"duplicate atoms in signature: {atoms}")

    @cached_property
    def index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.atoms)}

    def __len__(self):
        return len(self.atoms)

    @property
    def full_bits(self) -> int:
        return (1 << len(self.atoms)) - 1

    @property
    def full(self) -> Instance:
        return Instance(self, self.full_bits)

    def instance(self, names: Iterable[str]) -> Instance:
        return mk_instance(names, self)

    def from_bits(self, bits: int) -> Instance:
        return Instance(self, bits)

    def singletons(self) -> list[Instance]:
        return [Instance(self, 1 << i) for i in range(len(self.atoms))]


@dataclass(frozen=True)
class Instance:
    """A nonempty subset of the signature, stored as a bit mask."""

    sig: Signature
    bits: int

    def __post_init__(self):
        if self.bits <= 0:
            raise EmptyInstance("instances must be nonempty")
        if self.bits > self.sig.full_bits:
            raise ValueError(f"bit mask {self.bits:#x} wider than signature")

    @property
    def names(self) -> list[str]:
        return [a for i, a in enumerate(self.sig.atoms) if self.bits >> i & 1]

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def __len__(self):
        return bin(self.bits).count("1")

    def __contains__(self, name):
        return bool(self.bits >> self.sig.index[name] & 1)

    def __or__(self, other: Instance) -> Instance:
        return instance_union(self, other)

    def __le__(self, other: Instance) -> bool:
        return is_subinstance(self, other)

    def __lt__(self, other: Instance) -> bool:
        return self.bits != other.bits and is_subinstance(self, other)

    def __str__(self):
        return "{" + ",".join(self.names) + "}"

    def __repr__(self):
        return f"Instance({self})"


def mk_instance(names: Iterable[str], sig: Signature) -> Instance:
    bits = 0
    for name in names:
        try:
            bits |= 1 << sig.index[name]
        except KeyError:
            raise UnknownAtom(name) from None
    if not bits:
        raise EmptyInstance("instances must be nonempty")
    return Instance(sig, bits)


def _same_width(s: Instance, t: Instance):
    if len(s.sig) != len(t.sig):
        raise ValueError("instances over signatures of different width")


def instance_union(s: Instance, t: Instance) -> Instance:
    _same_width(s, t)
    return Instance(s.sig, s.bits | t.bits)


def is_subinstance(s: Instance, t: Instance) -> bool:
    _same_width(s, t)
    return s.bits & ~t.bits == 0


def submasks_between(lower: int, upper: int) -> Iterator[int]:
    """Nonempty masks r with lower ⊆ r ⊆ upper, in increasing order."""
    if lower & ~upper:
        return
    free = upper & ~lower
    sub = 0
    while True:
        r = lower | sub
        if r:
            yield r
        if sub == free:
            return
        sub = (sub - free) & free


def instance_range(lower: Optional[Instance], upper: Instance) -> Iterator[Instance]:
    low = lower.bits if lower is not None else 0
    for bits in submasks_between(low, upper.bits):
        yield Instance(upper.sig, bits)


def range_size(lower: Optional[Instance], upper: Instance) -> int:
    low = lower.bits if lower is not None else 0
    if low & ~upper.bits:
        return 0
    n = 1 << bin(upper.bits & ~low).count("1")
    return n if low else n - 1


class _XModality:
    """The single variable modality ``x``."""

    _singleton = None

    def __new__(cls):
        if cls._singleton is None:
            cls._singleton = super().__new__(cls)
        return cls._singleton

    def __repr__(self):
        return "X"

    def __str__(self):
        return "x"

    def __reduce__(self):
        return (_XModality, ())


X = _XModality()

Modality = Union[Instance, _XModality]


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def __str__(self):
        from .parser import render

        return render(self)

    # Operator sugar for building formulas in code and tests.
    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)

    def __rshift__(self, other):
        return Implies(self, other)


@dataclass(frozen=True, repr=False)
class Bottom(Formula):
    def __repr__(self):
        return "Bottom()"


@dataclass(frozen=True, repr=False)
class Top(Formula):
    def __repr__(self):
        return "Top()"


@dataclass(frozen=True)
class Var(Formula):
    name: str


@dataclass(frozen=True)
class Lit(Formula):
    """Propositional literal; only produced by :func:`to_nnf`."""

    name: str
    positive: bool = True


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Box(Formula):
    mod: Modality
    sub: Formula


@dataclass(frozen=True)
class Diamond(Formula):
    mod: Modality
    sub: Formula


@dataclass(frozen=True)
class ForAll(Formula):
    lower: Optional[Instance]
    upper: Instance
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    lower: Optional[Instance]
    upper: Instance
    body: Formula


BINARY = (And, Or, Implies, Iff)
MODAL = (Box, Diamond)
QUANTIFIERS = (ForAll, Exists)
TOP, BOTTOM = Top(), Bottom()


def conjoin(parts: Sequence[Formula]) -> Formula:
    """Balanced conjunction; the empty conjunction is ``Top``."""
    return _fold(list(parts), And, TOP)


def disjoin(parts: Sequence[Formula]) -> Formula:
    return _fold(list(parts), Or, BOTTOM)


def _fold(parts, node, empty):
    if not parts:
        return empty
    if len(parts) == 1:
        return parts[0]
    mid = (len(parts) + 1) // 2
    return node(_fold(parts[:mid], node, empty), _fold(parts[mid:], node, empty))


def to_nnf(phi: Formula, positive: bool = True) -> Formula:
    """Negation normal form of ``phi`` (of ``¬phi`` when ``positive`` is false)."""
    match phi:
        case Bottom():
            return BOTTOM if positive else TOP
        case Top():
            return TOP if positive else BOTTOM
        case Var(name):
            return Lit(name, positive)
        case Lit(name, pol):
            return Lit(name, pol == positive)
        case Not(sub):
            return to_nnf(sub, not positive)
        case And(l, r):
            node = And if positive else Or
            return node(to_nnf(l, positive), to_nnf(r, positive))
        case Or(l, r):
            node = Or if positive else And
            return node(to_nnf(l, positive), to_nnf(r, positive))
        case Implies(l, r):
            if positive:
                return Or(to_nnf(l, False), to_nnf(r, True))
            return And(to_nnf(l, True), to_nnf(r, False))
        case Iff(l, r):
            lp, ln = to_nnf(l, True), to_nnf(l, False)
            rp, rn = to_nnf(r, True), to_nnf(r, False)
            if positive:
                return Or(And(lp, rp), And(ln, rn))
            return Or(And(lp, rn), And(ln, rp))
        case Box(mod, sub):
            node = Box if positive else Diamond
            return node(mod, to_nnf(sub, positive))
        case Diamond(mod, sub):
            node = Diamond if positive else Box
            return node(mod, to_nnf(sub, positive))
        case ForAll(lo, up, body):
            node = ForAll if positive else Exists
            return node(lo, up, to_nnf(body, positive))
        case Exists(lo, up, body):
            node = Exists if positive else ForAll
            return node(lo, up, to_nnf(body, positive))
    raise TypeError(f"not a formula: {phi!r}")


def is_nnf(phi: Formula) -> bool:
    match phi:
        case Lit() | Top() | Bottom():
            return True
        case And(l, r) | Or(l, r):
            return is_nnf(l) and is_nnf(r)
        case Box(_, sub) | Diamond(_, sub):
            return is_nnf(sub)
        case ForAll(_, _, body) | Exists(_, _, body):
            return is_nnf(body)
    return False


def substitute(phi: Formula, s: Instance) -> Formula:
    """Replace the free occurrences of x by ``s``; quantifiers bind x."""
    match phi:
        case Box(mod, sub):
            return Box(s if mod is X else mod, substitute(sub, s))
        case Diamond(mod, sub):
            return Diamond(s if mod is X else mod, substitute(sub, s))
        case Not(sub):
            return Not(substitute(sub, s))
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            return type(phi)(substitute(l, s), substitute(r, s))
    return phi


@lru_cache(maxsize=1 << 16)
def has_free_x(phi: Formula) -> bool:
    match phi:
        case Box(mod, sub) | Diamond(mod, sub):
            return mod is X or has_free_x(sub)
        case Not(sub):
            return has_free_x(sub)
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            return has_free_x(l) or has_free_x(r)
    return False


def is_closed(phi: Formula) -> bool:
    return not has_free_x(phi)


def modal_depth(phi: Formula) -> int:
    match phi:
        case Box(_, sub) | Diamond(_, sub):
            return 1 + modal_depth(sub)
        case Not(sub):
            return modal_depth(sub)
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            return max(modal_depth(l), modal_depth(r))
        case ForAll(_, _, body) | Exists(_, _, body):
            return modal_depth(body)
    return 0


def size(phi: Formula) -> int:
    """Number of constructor nodes."""
    match phi:
        case Box(_, sub) | Diamond(_, sub) | Not(sub):
            return 1 + size(sub)
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            return 1 + size(l) + size(r)
        case ForAll(_, _, body) | Exists(_, _, body):
            return 1 + size(body)
    return 1


def variables(phi: Formula) -> set[str]:
    out: set[str] = set()
    _collect_vars(phi, out)
    return out


def _collect_vars(phi, out):
    match phi:
        case Var(name) | Lit(name, _):
            out.add(name)
        case Box(_, sub) | Diamond(_, sub) | Not(sub):
            _collect_vars(sub, out)
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            _collect_vars(l, out)
            _collect_vars(r, out)
        case ForAll(_, _, body) | Exists(_, _, body):
            _collect_vars(body, out)


def constant_instances(phi: Formula) -> set[Instance]:
    """Constant modalities occurring in ``phi`` (quantifier bounds excluded)."""
    out: set[Instance] = set()
    _collect_instances(phi, out)
    return out


def _collect_instances(phi, out):
    match phi:
        case Box(mod, sub) | Diamond(mod, sub):
            if mod is not X:
                out.add(mod)
            _collect_instances(sub, out)
        case Not(sub):
            _collect_instances(sub, out)
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            _collect_instances(l, out)
            _collect_instances(r, out)
        case ForAll(_, _, body) | Exists(_, _, body):
            _collect_instances(body, out)


def replace_instance(phi: Formula, old: Instance, new: Instance) -> Formula:
    """Replace every constant modality ``old`` by ``new`` (quantifier bounds untouched)."""
    match phi:
        case Box(mod, sub) | Diamond(mod, sub):
            mod = new if mod == old else mod
            return type(phi)(mod, replace_instance(sub, old, new))
        case Not(sub):
            return Not(replace_instance(sub, old, new))
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            return type(phi)(replace_instance(l, old, new), replace_instance(r, old, new))
        case ForAll(lo, up, body) | Exists(lo, up, body):
            return type(phi)(lo, up, replace_instance(body, old, new))
    return phi


def count_quantifiers(phi: Formula) -> int:
    match phi:
        case Box(_, sub) | Diamond(_, sub) | Not(sub):
            return count_quantifiers(sub)
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            return count_quantifiers(l) + count_quantifiers(r)
        case ForAll(_, _, body) | Exists(_, _, body):
            return 1 + count_quantifiers(body)
    return 0
