"""Consistency, justifiability and belief queries on top of the tableau."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .core import (
    X,
    And,
    Box,
    Diamond,
    Exists,
    ForAll,
    Formula,
    Implies,
    Instance,
    Not,
    Signature,
    Top,
    is_closed,
    mk_instance,
    to_nnf,
)
from .errors import InternalVerificationFailure, OpenFormula
from .satcore import neg, pos
from .semantics import KripkeModel, holds
from .tableau import TableauState


@dataclass
class JustifyReport:
    verdict: str  # "yes" or "no"
    witness: Optional[Instance] = None
    model: Optional[KripkeModel] = None
    solver_calls: int = 0

    def __bool__(self):
        return self.verdict == "yes"

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "witness": self.witness.names if self.witness is not None else None,
            "model": self.model.to_json() if self.model is not None else None,
            "solver_calls": self.solver_calls,
        }


def _as_instance(s: Union[Instance, Iterable[str]], sig: Optional[Signature]) -> Instance:
    if isinstance(s, Instance):
        return s
    if sig is None:
        raise TypeError("a signature is needed to build an instance from names")
    return mk_instance(s, sig)


def _closed(phi: Formula, what: str):
    if not is_closed(phi):
        raise OpenFormula(f"{what} must not mention the variable modality")


def justification_formula(phi: Formula, sig: Signature) -> Formula:
    """Some consistent instance has the information ``phi``."""
    return Exists(None, sig.full, And(Diamond(X, Top()), Box(X, phi)))


def belief_formula(phi: Formula, sig: Signature) -> Formula:
    """``phi`` is justifiable and every consistent instance is open to ``phi``."""
    open_to = ForAll(None, sig.full, Implies(Diamond(X, Top()), Diamond(X, phi)))
    return And(justification_formula(phi, sig), open_to)


class ConsistencyProbe:
    """Incremental checks of ``Σ ∧ <s>true`` for many instances ``s``.

    The instance is a free valuation of x whose bits are fixed by solver
    assumptions, so clauses learned for one probe carry over to the next.
    """

    def __init__(self, sigma: Sequence[Formula], sig: Signature, **options):
        self.sig = sig
        self.state = TableauState(sig, **options)
        for phi in sigma:
            _closed(phi, "assertions")
            self.state.assert_formula(phi)
        self.beta = self.state.new_valuation()
        self.state.assert_formula(Diamond(X, Top()), val=self.beta)

    @property
    def calls(self) -> int:
        return self.state.stats["sat_calls"]

    def consistent(self, bits: int) -> bool:
        xs = self.state.valuations[self.beta].bits
        assumptions = [pos(v) if bits >> i & 1 else neg(v) for i, v in enumerate(xs)]
        return self.state.check(assumptions)

    def model(self) -> KripkeModel:
        return self.state.extract()


def instance_consistent(
    sigma: Sequence[Formula], s: Union[Instance, Iterable[str]], sig: Optional[Signature] = None, **options
) -> JustifyReport:
    """yes iff some model of ``sigma`` gives ``s`` a successor."""
    s = _as_instance(s, sig)
    probe = ConsistencyProbe(sigma, s.sig, **options)
    if probe.consistent(s.bits):
        return JustifyReport("yes", s, probe.model(), probe.calls)
    return JustifyReport("no", None, None, probe.calls)


def justifiable(sigma: Sequence[Formula], phi: Formula, sig: Signature, **options) -> JustifyReport:
    """yes iff ``Σ ∧ ∃x(<x>true ∧ [x]phi)`` is satisfiable; the witness is the chosen x."""
    _closed(phi, "the justified formula")
    claim = justification_formula(phi, sig)
    state = TableauState(sig, **options)
    for psi in sigma:
        state.assert_formula(psi)
    state.assert_formula(claim)
    if not state.check():
        return JustifyReport("no", None, None, state.stats["sat_calls"])
    model = state.extract()
    val = state.valuation_created_by(0, to_nnf(claim))
    witness = state.valuation(val)
    if not holds(model, 0, claim.body, witness):
        raise InternalVerificationFailure(f"witness {witness} does not justify {phi}")
    return JustifyReport("yes", witness, model, state.stats["sat_calls"])


def believed(
    sigma: Sequence[Formula], phi: Formula, sig: Signature, mode: str = "entail", **options
) -> JustifyReport:
    """Belief in ``phi`` given ``sigma``.

    ``mode="entail"`` (default) answers yes iff every model of ``sigma``
    satisfies the belief formula; a no comes with a countermodel.
    ``mode="sat"`` answers yes iff some model of ``sigma`` does.
    """
    _closed(phi, "the believed formula")
    belief = belief_formula(phi, sig)
    state = TableauState(sig, **options)
    for psi in sigma:
        state.assert_formula(psi)
    if mode == "entail":
        state.assert_formula(Not(belief))
        if state.check():
            return JustifyReport("no", None, state.extract(), state.stats["sat_calls"])
        return JustifyReport("yes", None, None, state.stats["sat_calls"])
    if mode != "sat":
        raise ValueError(f"unknown mode {mode!r}")
    state.assert_formula(belief)
    if not state.check():
        return JustifyReport("no", None, None, state.stats["sat_calls"])
    val = state.valuation_created_by(0, to_nnf(belief.left))
    return JustifyReport("yes", state.valuation(val), state.extract(), state.stats["sat_calls"])


def has_inconsistent_instance(sigma: Sequence[Formula], sig: Signature, **options) -> JustifyReport:
    """yes iff ``sigma`` entails ``∃x([x]false)``, i.e. ``Σ ∧ ∀x(<x>true)`` is unsatisfiable.

    A yes reports the first minimal inconsistent instance as witness.
    """
    state = TableauState(sig, **options)
    for psi in sigma:
        state.assert_formula(psi)
    state.assert_formula(ForAll(None, sig.full, Diamond(X, Top())))
    if state.check():
        return JustifyReport("no", None, state.extract(), state.stats["sat_calls"])
    probe = ConsistencyProbe(sigma, sig, **options)
    core = _shrink(probe, sig.full_bits)
    return JustifyReport("yes", Instance(sig, core), None, state.stats["sat_calls"] + probe.calls)


def _shrink(probe: ConsistencyProbe, bits: int) -> int:
    # drop atoms in index order while the rest stays inconsistent
    for i in range(len(probe.sig)):
        cand = bits & ~(1 << i)
        if cand != bits and cand and not probe.consistent(cand):
            bits = cand
    return bits


def _minimal_hitting_sets(cores: list[int], n: int):
    """Minimal atom sets meeting every core, by increasing size."""
    found: list[int] = []
    for k in range(n + 1):
        for combo in itertools.combinations(range(n), k):
            h = sum(1 << i for i in combo)
            if any(f & ~h == 0 for f in found):
                continue
            if all(h & c for c in cores):
                found.append(h)
                yield h


def minimal_inconsistent_instances(
    sigma: Sequence[Formula], sig: Signature, cap: Optional[int] = None, **options
) -> list[Instance]:
    """Subset-minimal instances that are inconsistent in every model of ``sigma``.

    Each core is found by shrinking a seed in atom order.  Later seeds are
    the complements of minimal hitting sets of the cores found so far, which
    are exactly the maximal instances containing no known core.
    """
    probe = ConsistencyProbe(sigma, sig, **options)
    full = sig.full_bits
    cores: list[int] = []
    if probe.consistent(full):
        return []
    seed: Optional[int] = full
    while seed is not None and (cap is None or len(cores) < cap):
        core = _shrink(probe, seed)
        for i in range(len(sig)):
            if core >> i & 1:
                sub = core & ~(1 << i)
                if sub and not probe.consistent(sub):
                    raise InternalVerificationFailure(f"core {Instance(sig, core)} is not minimal")
        cores.append(core)
        seed = None
        for h in _minimal_hitting_sets(cores, len(sig)):
            cand = full & ~h
            if cand and not probe.consistent(cand):
                seed = cand
                break
    return [Instance(sig, c) for c in cores]
