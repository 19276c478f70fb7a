"""Prefixed tableau for QK^D_S, run as lazy clause generation over :mod:`satcore`.

Every prefixed formula ``(world, valuation) ⊨ body`` gets a proxy literal.
Proxies only imply their content (negation normal form keeps every
subformula positive), so the clauses never need the converse direction.
The loop solves, fires the rules of every true proxy that has not fired yet,
and re-solves until a model leaves nothing to fire.

Worlds carry one access bit per atom; a world is reachable for an instance
iff the bits of all its atoms are set, which is how distribution arises
without any clause ever relating two instances.  Valuations of the variable
modality carry one bit per atom in the same way.

Universal quantifiers are instantiated at the upper bound, at the constant
modalities met at the same world (intersected with the upper bound) and at
the valuations used there.  Those triggers do not cover nested occurrences
of x under other modalities, so once nothing fires, every remaining range
element is model-checked against the candidate model and failing ones are
instantiated before the loop continues.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .core import (
    X,
    And,
    Bottom,
    Box,
    Diamond,
    Exists,
    ForAll,
    Formula,
    Instance,
    Lit,
    Or,
    Signature,
    Top,
    has_free_x,
    is_closed,
    submasks_between,
    substitute,
    to_nnf,
)
from .errors import InternalVerificationFailure, OpenFormula
from .satcore import make_solver, neg, pos
from .semantics import KripkeModel, holds

RULES = frozenset({"forall_0", "forall_s", "forall_x", "refine"})


@dataclass
class World:
    id: int
    parent: Optional[int]
    access: Optional[list[int]]  # one SAT variable per atom; None for the root
    label: Optional[Instance] = None  # constant instance of the creating diamond
    creator: Optional[int] = None
    props: dict[str, int] = field(default_factory=dict)
    children: list[int] = field(default_factory=list)
    const_mods: dict[int, None] = field(default_factory=dict)  # ordered set of instance masks
    var_vals: dict[int, None] = field(default_factory=dict)  # ordered set of valuation ids


@dataclass
class Valuation:
    id: int
    bits: list[int]  # one SAT variable per atom
    world: Optional[int] = None
    creator: Optional[int] = None


@dataclass
class PrefixedFormula:
    index: int
    world: int
    val: int
    body: Formula
    proxy: int


@dataclass
class Verdict:
    satisfiable: bool
    model: Optional[KripkeModel] = None
    stats: dict = field(default_factory=dict)

    @property
    def verdict(self) -> str:
        return "SAT" if self.satisfiable else "UNSAT"

    def __bool__(self):
        return self.satisfiable


class TableauState:
    def __init__(
        self,
        sig: Signature,
        *,
        solver: str = "cdcl",
        disabled: Iterable[str] = (),
        distribution: bool = True,
        scan_seed: Optional[int] = None,
        verify: bool = True,
    ):
        self.sig = sig
        self.n = len(sig)
        self.sat = make_solver(solver)
        self.disabled = frozenset(disabled)
        unknown = self.disabled - RULES
        if unknown:
            raise ValueError(f"unknown rules {sorted(unknown)}")
        self.distribution = distribution
        self.rng = random.Random(scan_seed) if scan_seed is not None else None
        self.verify = verify

        self.true_var = self.sat.new_var()
        self.sat.add_clause([pos(self.true_var)])
        self.worlds: list[World] = [World(0, None, None)]
        self.valuations: list[Valuation] = [Valuation(0, self.sat.new_vars(self.n))]
        self.registry: dict[tuple[int, int, Formula], int] = {}
        self.formulas: list[PrefixedFormula] = []
        self.ledger: set[tuple] = set()
        self.escape: dict[tuple[int, int], list[int]] = {}
        self.roots: list[tuple[Formula, int]] = []
        self.assignment: Optional[list[bool]] = None
        self.stats = {"sat_calls": 0, "rounds": 0, "firings": 0, "refinements": 0}

    # -- registration --------------------------------------------------

    def new_valuation(self, world: Optional[int] = None, creator: Optional[int] = None) -> int:
        bits = self.sat.new_vars(self.n)
        self.sat.add_clause([pos(b) for b in bits])
        self.valuations.append(Valuation(len(self.valuations), bits, world, creator))
        return len(self.valuations) - 1

    def _new_world(self, parent: int, label: Optional[Instance], creator: int) -> World:
        w = World(len(self.worlds), parent, self.sat.new_vars(self.n), label, creator)
        self.worlds.append(w)
        self.worlds[parent].children.append(w.id)
        return w

    def literal(self, world: int, val: int, body: Formula) -> int:
        """Proxy literal of ``(world, val) ⊨ body``, registering it if new."""
        match body:
            case Top():
                return pos(self.true_var)
            case Bottom():
                return neg(self.true_var)
            case Lit(name, positive):
                props = self.worlds[world].props
                if name not in props:
                    props[name] = self.sat.new_var()
                return pos(props[name]) if positive else neg(props[name])
        if not has_free_x(body):
            val = 0
        key = (world, val, body)
        proxy = self.registry.get(key)
        if proxy is not None:
            return proxy
        proxy = pos(self.sat.new_var())
        self.registry[key] = proxy
        pf = PrefixedFormula(len(self.formulas), world, val, body, proxy)
        self.formulas.append(pf)
        if isinstance(body, (Box, Diamond)):
            w = self.worlds[world]
            if body.mod is X:
                w.var_vals[val] = None
            else:
                w.const_mods[body.mod.bits] = None
        elif isinstance(body, (And, Or)):
            # propositional rules are cheap and fire at registration
            self._mark(("prop", pf.index))
            left = self.literal(world, val, body.left)
            right = self.literal(world, val, body.right)
            if isinstance(body, And):
                self._clause([proxy ^ 1, left])
                self._clause([proxy ^ 1, right])
            else:
                self._clause([proxy ^ 1, left, right])
        return proxy

    def assert_formula(self, phi: Formula, val: int = 0) -> int:
        """Assert ``phi`` at the root world under valuation ``val``."""
        if val == 0 and not is_closed(phi):
            raise OpenFormula("the tableau only accepts closed formulas at the root")
        proxy = self.literal(0, val, to_nnf(phi))
        self._clause([proxy])
        self.roots.append((phi, val))
        return proxy

    def _clause(self, lits: Sequence[int]):
        self.sat.add_clause(lits)

    def _mark(self, key) -> bool:
        if key in self.ledger:
            return False
        self.ledger.add(key)
        self.stats["firings"] += 1
        return True

    # -- rules ---------------------------------------------------------

    def _is_true(self, literal: int) -> bool:
        v = literal >> 1
        return v < len(self.assignment) and self.assignment[v] != bool(literal & 1)

    def _fire_diamond(self, pf: PrefixedFormula):
        if not self._mark(("dia", pf.index)):
            return
        mod, sub = pf.body.mod, pf.body.sub
        label = None if mod is X else mod
        child = self._new_world(pf.world, label, pf.index)
        nv = pf.proxy ^ 1
        if mod is X:
            xs = self.valuations[pf.val].bits
            for i in range(self.n):
                self._clause([nv, neg(xs[i]), pos(child.access[i])])
        else:
            for i in range(self.n):
                if mod.bits >> i & 1:
                    self._clause([nv, pos(child.access[i])])
        self._clause([nv, self.literal(child.id, pf.val, sub)])

    def _escape_vars(self, val: int, child: int) -> list[int]:
        # d_i -> (x_i(val) and not p_i(child)): the valuation misses the child
        key = (val, child)
        if key not in self.escape:
            xs, ps = self.valuations[val].bits, self.worlds[child].access
            ds = self.sat.new_vars(self.n)
            for d, x, p in zip(ds, xs, ps):
                self._clause([neg(d), pos(x)])
                self._clause([neg(d), neg(p)])
            self.escape[key] = ds
        return self.escape[key]

    def _fire_box(self, pf: PrefixedFormula, child: int):
        if not self._mark(("box", pf.index, child)):
            return
        mod, sub = pf.body.mod, pf.body.sub
        c = self.worlds[child]
        if mod is X:
            guard = [pos(d) for d in self._escape_vars(pf.val, child)]
        else:
            if not self.distribution and c.label != mod:
                return
            guard = [neg(c.access[i]) for i in range(self.n) if mod.bits >> i & 1]
        self._clause([pf.proxy ^ 1, *guard, self.literal(child, pf.val, sub)])

    def _fire_exists(self, pf: PrefixedFormula):
        if not self._mark(("ex", pf.index)):
            return
        lo, up, body = pf.body.lower, pf.body.upper, pf.body.body
        low = lo.bits if lo is not None else 0
        b = self.new_valuation(pf.world, pf.index)
        xs = self.valuations[b].bits
        nv = pf.proxy ^ 1
        for i in range(self.n):
            if not up.bits >> i & 1:
                self._clause([nv, neg(xs[i])])
            if low >> i & 1:
                self._clause([nv, pos(xs[i])])
        self._clause([nv, *(pos(xs[i]) for i in range(self.n) if up.bits >> i & 1)])
        self._clause([nv, self.literal(pf.world, b, body)])

    def _instantiate(self, pf: PrefixedFormula, bits: int) -> bool:
        if not self._mark(("inst", pf.index, bits)):
            return False
        inst = substitute(pf.body.body, Instance(self.sig, bits))
        self._clause([pf.proxy ^ 1, self.literal(pf.world, 0, inst)])
        return True

    def _fire_forall(self, pf: PrefixedFormula) -> int:
        lo, up, body = pf.body.lower, pf.body.upper, pf.body.body
        low = lo.bits if lo is not None else 0
        before = self.stats["firings"]
        if low & ~up.bits:
            return 0
        if "forall_0" not in self.disabled:
            self._instantiate(pf, up.bits)
        if not has_free_x(body):
            return self.stats["firings"] - before
        w = self.worlds[pf.world]
        if "forall_s" not in self.disabled:
            for t in list(w.const_mods):
                r = t & up.bits
                if r and r & low == low:
                    self._instantiate(pf, r)
        if "forall_x" not in self.disabled:
            for b in list(w.var_vals):
                if not self._mark(("fx", pf.index, b)):
                    continue
                xs = self.valuations[b].bits
                guard = [neg(xs[i]) for i in range(self.n) if low >> i & 1]
                guard += [pos(xs[i]) for i in range(self.n) if not up.bits >> i & 1]
                self._clause([pf.proxy ^ 1, *guard, self.literal(pf.world, b, body)])
        return self.stats["firings"] - before

    def _scan(self) -> int:
        before = self.stats["firings"]
        order = list(range(len(self.formulas)))
        if self.rng is not None:
            self.rng.shuffle(order)
        for i in order:
            pf = self.formulas[i]
            if not self._is_true(pf.proxy):
                continue
            body = pf.body
            if isinstance(body, Diamond):
                self._fire_diamond(pf)
            elif isinstance(body, Box):
                for child in list(self.worlds[pf.world].children):
                    self._fire_box(pf, child)
            elif isinstance(body, Exists):
                self._fire_exists(pf)
            elif isinstance(body, ForAll):
                self._fire_forall(pf)
        return self.stats["firings"] - before

    def _refine(self) -> int:
        model = self.extract()
        added = 0
        for pf in list(self.formulas):
            body = pf.body
            if not isinstance(body, ForAll) or not self._is_true(pf.proxy) or not has_free_x(body.body):
                continue
            low = body.lower.bits if body.lower is not None else 0
            for r in submasks_between(low, body.upper.bits):
                if ("inst", pf.index, r) in self.ledger:
                    continue
                inst = substitute(body.body, Instance(self.sig, r))
                if not holds(model, pf.world, inst):
                    self._instantiate(pf, r)
                    added += 1
        self.stats["refinements"] += added
        return added

    # -- main loop -----------------------------------------------------

    def check(self, assumptions: Sequence[int] = ()) -> bool:
        """Saturate under ``assumptions``; True iff an open branch remains."""
        while True:
            self.stats["sat_calls"] += 1
            if not self.sat.solve(assumptions):
                self.assignment = None
                return False
            self.assignment = self.sat.model
            self.stats["rounds"] += 1
            if self._scan():
                continue
            if "refine" not in self.disabled and self._refine():
                continue
            if self.verify:
                self._verify(self.extract())
            return True

    def _verify(self, model: KripkeModel):
        for phi, val in self.roots:
            beta = self.valuation(val) if val else None
            if not holds(model, 0, phi, beta):
                raise InternalVerificationFailure(f"extracted model falsifies {phi}")

    def valuation(self, val: int) -> Instance:
        bits = sum(1 << i for i, b in enumerate(self.valuations[val].bits) if self.assignment[b])
        return Instance(self.sig, bits)

    def valuation_name(self, val: int) -> str:
        # valuation 0 is the unused placeholder for closed formulas
        return f"b{val - 1}"

    def extract(self) -> KripkeModel:
        """Kripke model read off the current assignment."""
        a = self.assignment
        edges: dict[str, set[tuple[int, int]]] = {}
        for w in self.worlds[1:]:
            for i, p in enumerate(w.access):
                if a[p]:
                    edges.setdefault(self.sig.atoms[i], set()).add((w.parent, w.id))
        assignment = {
            w.id: frozenset(name for name, v in w.props.items() if a[v]) for w in self.worlds
        }
        xs = {self.valuation_name(v.id): self.valuation(v.id) for v in self.valuations[1:]}
        return KripkeModel(self.sig, [w.id for w in self.worlds], edges, assignment, 0, xs)

    def valuation_created_by(self, world: int, body: Formula) -> Optional[int]:
        """Valuation introduced by the existential ``body`` at ``world``, if it fired."""
        for v in self.valuations[1:]:
            if v.creator is not None:
                pf = self.formulas[v.creator]
                if pf.world == world and pf.body == body:
                    return v.id
        return None

    def summary(self) -> dict:
        out = dict(self.stats)
        out.update(
            worlds=len(self.worlds),
            valuations=len(self.valuations) - 1,
            proxies=len(self.formulas),
            sat_vars=self.sat.num_vars,
            ledger=len(self.ledger),
        )
        return out


def solve(phi: Formula, sig: Signature, **options) -> Verdict:
    """Decide satisfiability of the closed formula ``phi``.

    Keyword options are passed to :class:`TableauState`.  A SAT verdict
    carries a model whose designated world satisfies ``phi``.
    """
    if not is_closed(phi):
        raise OpenFormula("solve needs a closed formula")
    state = TableauState(sig, **options)
    state.assert_formula(phi)
    if state.check():
        return Verdict(True, state.extract(), state.summary())
    return Verdict(False, None, state.summary())
