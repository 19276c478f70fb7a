"""Random formulas for differential testing."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, replace

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
    Not,
    Or,
    Signature,
    Top,
    Var,
    constant_instances,
    replace_instance,
    variables,
)


@dataclass
class FuzzConfig:
    max_atoms: int = 3
    max_vars: int = 3
    max_depth: int = 2  # modal depth
    max_quantifiers: int = 2
    max_size: int = 4  # recursion budget for connectives


def random_instance(rng: random.Random, sig: Signature, within: int | None = None) -> Instance:
    space = sig.full_bits if within is None else within
    while True:
        bits = rng.randrange(1, sig.full_bits + 1) & space
        if bits:
            return Instance(sig, bits)


class FormulaGenerator:
    def __init__(self, sig: Signature, config: FuzzConfig = FuzzConfig(), seed: int = 0):
        self.sig = sig
        self.cfg = config
        self.rng = random.Random(seed)
        self.names = [f"p{i}" for i in range(config.max_vars)]

    def closed(self) -> Formula:
        self._quants = 0
        return self._gen(self.cfg.max_size, self.cfg.max_depth, bound=False)

    def _gen(self, budget, depth, bound) -> Formula:
        rng = self.rng
        if budget <= 0:
            r = rng.random()
            if r < 0.08:
                return Top()
            if r < 0.14:
                return Bottom()
            return Var(rng.choice(self.names))
        choices = ["var", "not", "and", "or", "imp", "iff"]
        if depth > 0:
            choices += ["box", "dia", "box", "dia"]
        if self._quants < self.cfg.max_quantifiers:
            choices += ["all", "ex"]
        kind = rng.choice(choices)
        if kind == "var":
            return Var(rng.choice(self.names))
        if kind == "not":
            return Not(self._gen(budget - 1, depth, bound))
        if kind in ("and", "or", "imp", "iff"):
            cls = {"and": And, "or": Or, "imp": Implies, "iff": Iff}[kind]
            return cls(self._gen(budget - 1, depth, bound), self._gen(budget - 2, depth, bound))
        if kind in ("box", "dia"):
            mod = X if bound and rng.random() < 0.6 else random_instance(rng, self.sig)
            cls = Box if kind == "box" else Diamond
            return cls(mod, self._gen(budget - 1, depth - 1, bound))
        self._quants += 1
        up = random_instance(rng, self.sig) if rng.random() < 0.5 else self.sig.full
        lo = None
        r = rng.random()
        if r < 0.25:
            lo = random_instance(rng, self.sig, within=up.bits)
        elif r < 0.3:
            lo = random_instance(rng, self.sig)  # may leave the range empty
        cls = ForAll if kind == "all" else Exists
        return cls(lo, up, self._gen(budget - 1, depth, True))


def random_signature(rng: random.Random, max_atoms: int = 3) -> Signature:
    return Signature(tuple(f"s{i}" for i in range(rng.randint(1, max_atoms))))


def formula_stream(count: int, seed: int = 0, config: FuzzConfig = FuzzConfig(), conjuncts: int = 1):
    """``count`` pairs ``(signature, closed formula)``.

    With ``conjuncts > 1`` each formula is a conjunction of up to that many
    independent draws, which pushes the mix towards unsatisfiable cases.
    """
    rng = random.Random(seed)
    for _ in range(count):
        sig = random_signature(rng, config.max_atoms)
        gen = FormulaGenerator(sig, config, seed=rng.randrange(1 << 30))
        parts = [gen.closed() for _ in range(rng.randint(1, conjuncts))]
        phi = parts[0]
        for part in parts[1:]:
            phi = And(phi, part)
        yield sig, phi


def single_instance_formula(sig: Signature, s: Instance, seed: int, config: FuzzConfig = FuzzConfig()) -> Formula:
    """Quantifier-free formula whose only modality is ``s`` (at least once)."""
    gen = FormulaGenerator(sig, replace(config, max_quantifiers=0), seed=seed)
    while True:
        phi = gen.closed()
        found = constant_instances(phi)
        if found:
            break
    for inst in found:
        phi = replace_instance(phi, inst, s)
    return phi


def propositional_tautology(phi: Formula) -> bool:
    """Truth-table check for a formula built from variables and connectives only."""
    names = sorted(variables(phi))
    for values in itertools.product((False, True), repeat=len(names)):
        if not _eval(phi, dict(zip(names, values))):
            return False
    return True


def _eval(phi, env) -> bool:
    match phi:
        case Top():
            return True
        case Bottom():
            return False
        case Var(name):
            return env[name]
        case Not(sub):
            return not _eval(sub, env)
        case And(l, r):
            return _eval(l, env) and _eval(r, env)
        case Or(l, r):
            return _eval(l, env) or _eval(r, env)
        case Implies(l, r):
            return not _eval(l, env) or _eval(r, env)
        case Iff(l, r):
            return _eval(l, env) == _eval(r, env)
    raise TypeError(f"not propositional: {phi!r}")


def random_tautologies(count: int, seed: int = 0, n_vars: int = 3, size: int = 4) -> list[Formula]:
    """Propositional tautologies found by rejection sampling."""
    rng = random.Random(seed)
    sig = Signature(("s0",))
    cfg = FuzzConfig(max_vars=n_vars, max_depth=0, max_quantifiers=0, max_size=size)
    gen = FormulaGenerator(sig, cfg, seed=rng.randrange(1 << 30))
    out = []
    while len(out) < count:
        phi = gen.closed()
        if variables(phi) and propositional_tautology(phi):
            out.append(phi)
    return out
