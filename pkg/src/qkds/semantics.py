"""Explicit Kripke structures, a model checker and a brute-force satisfiability oracle.

The accessibility relation of an instance is the intersection of the
relations of its atoms; it is derived on demand and never stored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

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
    instance_range,
    is_closed,
    mk_instance,
    variables,
)
from .errors import FreeVariableUnassigned, LimitsExceeded, OpenFormula

XValuation = dict[str, Instance]


@dataclass
class KripkeModel:
    sig: Signature
    worlds: list[int]
    edges: dict[str, set[tuple[int, int]]]
    assignment: dict[int, frozenset[str]]
    designated: Optional[int] = 0
    x: XValuation = field(default_factory=dict)
    _succ: Optional[dict] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.worlds:
            raise ValueError("a Kripke model needs at least one world")
        known = set(self.worlds)
        for atom, pairs in self.edges.items():
            if atom not in self.sig.index:
                raise ValueError(f"edges for unknown atom {atom!r}")
            for u, v in pairs:
                if u not in known or v not in known:
                    raise ValueError(f"edge ({u},{v}) of {atom} leaves the world set")
        for w in self.assignment:
            if w not in known:
                raise ValueError(f"assignment for unknown world {w}")
        if self.designated is not None and self.designated not in known:
            raise ValueError(f"designated world {self.designated} is not a world")

    def _successor_table(self):
        # world -> list of (successor, mask of atoms whose relation holds the pair)
        if self._succ is None:
            masks: dict[tuple[int, int], int] = {}
            for atom, pairs in self.edges.items():
                bit = 1 << self.sig.index[atom]
                for pair in pairs:
                    masks[pair] = masks.get(pair, 0) | bit
            table: dict[int, list[tuple[int, int]]] = {w: [] for w in self.worlds}
            for (u, v), mask in sorted(masks.items()):
                table[u].append((v, mask))
            self._succ = table
        return self._succ

    def successors(self, world: int, s: Instance) -> list[int]:
        return [v for v, mask in self._successor_table()[world] if s.bits & ~mask == 0]

    def true_vars(self, world: int) -> frozenset[str]:
        return self.assignment.get(world, frozenset())

    def to_json(self) -> dict:
        data = {
            "worlds": list(self.worlds),
            "edges": {
                atom: sorted([list(p) for p in pairs])
                for atom, pairs in sorted(self.edges.items(), key=lambda kv: self.sig.index[kv[0]])
                if pairs
            },
            "assignment": {
                str(w): sorted(self.assignment[w]) for w in self.worlds if self.assignment.get(w)
            },
            "designated": self.designated,
        }
        if self.x:
            data["x"] = {name: inst.names for name, inst in self.x.items()}
        return data

    def dumps(self, **kwargs) -> str:
        return json.dumps(self.to_json(), **kwargs)

    @classmethod
    def from_json(cls, data: dict, sig: Signature) -> KripkeModel:
        worlds = [int(w) for w in data["worlds"]]
        edges = {atom: {(int(u), int(v)) for u, v in pairs} for atom, pairs in data.get("edges", {}).items()}
        assignment = {int(w): frozenset(vs) for w, vs in data.get("assignment", {}).items()}
        xs = {name: mk_instance(names, sig) for name, names in data.get("x", {}).items()}
        designated = data.get("designated", worlds[0])
        return cls(sig, worlds, edges, assignment, designated, xs)


def accessibility(model: KripkeModel, s: Instance) -> set[tuple[int, int]]:
    rel: Optional[set[tuple[int, int]]] = None
    for atom in s.names:
        pairs = model.edges.get(atom, set())
        rel = set(pairs) if rel is None else rel & pairs
    return rel or set()


def _resolve(mod, beta):
    if mod is X:
        if beta is None:
            raise FreeVariableUnassigned("x is free but no instance was supplied")
        return beta
    return mod


def holds(model: KripkeModel, world: int, phi: Formula, beta: Optional[Instance] = None) -> bool:
    """Truth of ``phi`` at ``world``; ``beta`` interprets a free x."""
    match phi:
        case Bottom():
            return False
        case Top():
            return True
        case Var(name):
            return name in model.true_vars(world)
        case Lit(name, positive):
            return (name in model.true_vars(world)) == positive
        case Not(sub):
            return not holds(model, world, sub, beta)
        case And(l, r):
            return holds(model, world, l, beta) and holds(model, world, r, beta)
        case Or(l, r):
            return holds(model, world, l, beta) or holds(model, world, r, beta)
        case Implies(l, r):
            return not holds(model, world, l, beta) or holds(model, world, r, beta)
        case Iff(l, r):
            return holds(model, world, l, beta) == holds(model, world, r, beta)
        case Box(mod, sub):
            s = _resolve(mod, beta)
            return all(holds(model, v, sub, beta) for v in model.successors(world, s))
        case Diamond(mod, sub):
            s = _resolve(mod, beta)
            return any(holds(model, v, sub, beta) for v in model.successors(world, s))
        case ForAll(lo, up, body):
            return all(holds(model, world, body, r) for r in instance_range(lo, up))
        case Exists(lo, up, body):
            return any(holds(model, world, body, r) for r in instance_range(lo, up))
    raise TypeError(f"not a formula: {phi!r}")


def satisfiable_in(model: KripkeModel, phi: Formula) -> bool:
    """True iff some world of ``model`` satisfies ``phi``."""
    return any(holds(model, w, phi) for w in model.worlds)


def valid_in(model: KripkeModel, phi: Formula) -> bool:
    return all(holds(model, w, phi) for w in model.worlds)


@dataclass(frozen=True)
class OracleLimits:
    max_worlds: int = 2
    max_atoms: int = 2
    max_vars: int = 2
    # hard cap on the number of enumerated models of one size
    max_models: int = 1 << 19


class _Batch:
    """Every model with ``n`` worlds at once: arrays indexed by (model, world)."""

    def __init__(self, sig: Signature, names: list[str], n: int):
        self.n = n
        self.sig = sig
        self.names = names
        na, nv = len(sig), len(names)
        self.rel_bits = na * n * n
        self.asg_bits = nv * n
        idx = np.arange(1 << (self.rel_bits + self.asg_bits), dtype=np.int64)
        rel, asg = idx >> self.asg_bits, idx & ((1 << self.asg_bits) - 1)
        pair_bits = np.arange(n * n, dtype=np.int64).reshape(n, n)
        self.rel = [
            ((rel[:, None, None] >> (a * n * n + pair_bits)) & 1).astype(bool) for a in range(na)
        ]
        world_bits = np.arange(n, dtype=np.int64)
        self.val = {
            name: ((asg[:, None] >> (k * n + world_bits)) & 1).astype(bool) for k, name in enumerate(names)
        }
        self.size = idx.size
        self._access: dict[int, np.ndarray] = {}
        self._memo: dict = {}

    def access(self, bits: int) -> np.ndarray:
        if bits not in self._access:
            out = np.ones((self.size, self.n, self.n), dtype=bool)
            for a in range(len(self.sig)):
                if bits >> a & 1:
                    out &= self.rel[a]
            self._access[bits] = out
        return self._access[bits]

    def ext(self, phi: Formula, beta: Optional[int]) -> np.ndarray:
        key = (phi, beta)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = self._ext(phi, beta)
        return hit

    def _ext(self, phi, beta):
        shape = (self.size, self.n)
        match phi:
            case Bottom():
                return np.zeros(shape, dtype=bool)
            case Top():
                return np.ones(shape, dtype=bool)
            case Var(name):
                return self.val[name]
            case Lit(name, positive):
                return self.val[name] if positive else ~self.val[name]
            case Not(sub):
                return ~self.ext(sub, beta)
            case And(l, r):
                return self.ext(l, beta) & self.ext(r, beta)
            case Or(l, r):
                return self.ext(l, beta) | self.ext(r, beta)
            case Implies(l, r):
                return ~self.ext(l, beta) | self.ext(r, beta)
            case Iff(l, r):
                return self.ext(l, beta) == self.ext(r, beta)
            case Box(mod, sub):
                acc = self.access(self._bits(mod, beta))
                return np.all(~acc | self.ext(sub, beta)[:, None, :], axis=2)
            case Diamond(mod, sub):
                acc = self.access(self._bits(mod, beta))
                return np.any(acc & self.ext(sub, beta)[:, None, :], axis=2)
            case ForAll(lo, up, body):
                out = np.ones(shape, dtype=bool)
                for r in instance_range(lo, up):
                    out = out & self.ext(body, r.bits)
                return out
            case Exists(lo, up, body):
                out = np.zeros(shape, dtype=bool)
                for r in instance_range(lo, up):
                    out = out | self.ext(body, r.bits)
                return out
        raise TypeError(f"not a formula: {phi!r}")

    @staticmethod
    def _bits(mod, beta):
        if mod is X:
            if beta is None:
                raise FreeVariableUnassigned("x is free but no instance was supplied")
            return beta
        return mod.bits

    def model(self, index: int) -> KripkeModel:
        rel, asg = index >> self.asg_bits, index & ((1 << self.asg_bits) - 1)
        n = self.n
        edges = {}
        for a, atom in enumerate(self.sig.atoms):
            pairs = {(i, j) for i in range(n) for j in range(n) if rel >> (a * n * n + i * n + j) & 1}
            if pairs:
                edges[atom] = pairs
        assignment = {
            w: frozenset(name for k, name in enumerate(self.names) if asg >> (k * n + w) & 1)
            for w in range(n)
        }
        return KripkeModel(self.sig, list(range(n)), edges, assignment, 0)


@lru_cache(maxsize=4)
def _batch(sig: Signature, names: tuple[str, ...], n: int) -> _Batch:
    # repeated queries over the same vocabulary share one enumeration
    return _Batch(sig, list(names), n)


def _check_limits(phi, sig, limits):
    names = sorted(variables(phi))
    if len(sig) > limits.max_atoms:
        raise LimitsExceeded(f"{len(sig)} atoms > {limits.max_atoms}")
    if len(names) > limits.max_vars:
        raise LimitsExceeded(f"{len(names)} variables > {limits.max_vars}")
    biggest = len(sig) * limits.max_worlds**2 + len(names) * limits.max_worlds
    if 1 << biggest > limits.max_models:
        raise LimitsExceeded(f"2^{biggest} models exceed the enumeration cap")
    return names


def brute_force_sat(
    phi: Formula, sig: Signature, limits: OracleLimits = OracleLimits()
) -> Optional[tuple[KripkeModel, int]]:
    """First pointed model of ``phi`` in enumeration order, or ``None``.

    Models are enumerated by number of worlds, then accessibility relations
    in bit order, then truth assignments.  Only meaningful at tiny scale:
    an absent result says nothing about models with more worlds.
    """
    if not is_closed(phi):
        raise OpenFormula("brute_force_sat needs a closed formula")
    names = _check_limits(phi, sig, limits)
    for n in range(1, limits.max_worlds + 1):
        batch = _batch(sig, tuple(names), n)
        ext = batch.ext(phi, None)
        hits = np.flatnonzero(ext.any(axis=1))
        if hits.size:
            index = int(hits[0])
            world = int(np.flatnonzero(ext[index])[0])
            model = batch.model(index)
            model.designated = world
            return model, world
    return None


def count_models(phi: Formula, sig: Signature, n_worlds: int, limits: OracleLimits = OracleLimits()) -> int:
    """Number of pointed models of ``phi`` with exactly ``n_worlds`` worlds."""
    names = _check_limits(phi, sig, limits)
    batch = _batch(sig, tuple(names), n_worlds)
    return int(batch.ext(phi, None).sum())
