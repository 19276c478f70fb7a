"""Built-in consistency checks used by ``qkds selftest``."""

from __future__ import annotations

import random
from dataclasses import dataclass
from importlib.resources import files

from .core import (
    X,
    And,
    Box,
    Diamond,
    ForAll,
    Formula,
    Iff,
    Implies,
    Instance,
    Not,
    Signature,
    Var,
)
from .errors import InternalVerificationFailure
from .expansion import expand
from .fuzz import formula_stream, random_tautologies
from .parser import Problem, parse_formula, parse_problem
from .tableau import solve

FIXTURE_VERDICTS = {"q1": False, "q2": True, "q3": True, "q4": True, "q5": True}


def running_example() -> Problem:
    return parse_problem(files("qkds").joinpath("data/running_example.qk").read_text())


def _random_pair(rng: random.Random, sig: Signature) -> tuple[Instance, Instance]:
    # s ⊆ t, both nonempty
    t = rng.randrange(1, sig.full_bits + 1)
    s = 0
    while not s:
        s = rng.randrange(1, sig.full_bits + 1) & t
    return Instance(sig, s), Instance(sig, t)


def axiom_suite(seed: int = 0, n: int = 20) -> list[tuple[str, Formula, Signature]]:
    """Negated axiom instances; every one of them must be unsatisfiable."""
    rng = random.Random(seed)
    sig = Signature(tuple(f"a{i}" for i in range(8)))
    A, B = Var("A"), Var("B")
    out: list[tuple[str, Formula, Signature]] = []
    for k in range(n):
        s, t = _random_pair(rng, sig)
        k_ax = Implies(Box(s, Implies(A, B)), Implies(Box(s, A), Box(s, B)))
        out.append((f"K[{s}]", Not(k_ax), sig))
        out.append((f"Dist[{s}<={t}]", Not(Implies(Box(s, A), Box(t, A))), sig))
        out.append((f"Dual[{t}]", Not(Iff(Diamond(t, A), Not(Box(t, Not(A))))), sig))
    k_x = Implies(Box(X, Implies(A, B)), Implies(Box(X, A), Box(X, B)))
    out.append(("K[x]", Not(ForAll(None, sig.full, k_x)), sig))
    for k, tau in enumerate(random_tautologies(n, seed=seed)):
        s = Instance(sig, rng.randrange(1, sig.full_bits + 1))
        out.append((f"Nec{k}[{s}]", Not(Box(s, tau)), sig))
    return out


def fuzz_disagreements(count: int = 200, seed: int = 0, **options) -> list[str]:
    """Formulas where the tableau and the expansion path disagree."""
    bad = []
    for sig, phi in formula_stream(count, seed=seed, conjuncts=3):
        if solve(phi, sig, **options).satisfiable != solve(expand(phi), sig).satisfiable:
            bad.append(str(phi))
    return bad


@dataclass
class Mutation:
    name: str
    options: dict
    formula: str
    atoms: tuple = ("a", "b")
    expected: bool = False


MUTATIONS = [
    Mutation("no universal triggers", {"disabled": {"forall_s", "refine"}}, "<a> ~A & forall x <= {a,b} ([x] A)"),
    Mutation(
        "no nested refinement",
        {"disabled": {"refine"}},
        "<c> <a> ~A & forall x <= {a,b} ([c] [x] A)",
        ("a", "b", "c"),
    ),
    Mutation("no distribution", {"distribution": False}, "<a,b> true & [a] A & [b] ~A"),
]


def mutation_detected(m: Mutation) -> bool:
    """True iff the crippled tableau gets the formula wrong or fails verification."""
    sig = Signature(m.atoms)
    phi = parse_formula(m.formula, sig)
    try:
        return solve(phi, sig, **m.options).satisfiable != m.expected
    except InternalVerificationFailure:
        return True


def run_all(fuzz_count: int = 200, seed: int = 0, out=print) -> bool:
    ok = True

    def report(name, passed, detail=""):
        nonlocal ok
        ok &= passed
        out(f"{'PASS' if passed else 'FAIL'} {name}{': ' + detail if detail else ''}")

    failures = [name for name, phi, sig in axiom_suite(seed) if solve(phi, sig).satisfiable]
    report("axioms", not failures, ", ".join(failures))

    problem = running_example()
    sigma = problem.conjunction()
    wrong = [
        name
        for name, phi in problem.queries
        if solve(And(sigma, phi), problem.signature).satisfiable != FIXTURE_VERDICTS[name]
    ]
    report("running example", not wrong, ", ".join(wrong))

    bad = fuzz_disagreements(fuzz_count, seed)
    report(f"fuzz agreement ({fuzz_count} formulas)", not bad, "; ".join(bad[:3]))

    for m in MUTATIONS:
        report(f"mutation caught: {m.name}", mutation_detected(m))
    return ok
