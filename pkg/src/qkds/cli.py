"""Command-line front end: ``qkds solve|expand|check|selftest``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from .core import And, Not, conjoin
from .errors import InternalVerificationFailure, QKError
from .expansion import expand, expansion_size, quantifier_ranges
from .parser import Problem, parse_problem, render
from .semantics import KripkeModel, holds
from .tableau import Verdict, solve

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_VERIFY = 0, 1, 2, 3


def _err(msg: str):
    print(f"qkds: {msg}", file=sys.stderr)


def _load_problem(path: str) -> Problem:
    return parse_problem(Path(path).read_text())


def _goals(problem: Problem, negate: bool):
    sigma = problem.conjunction()
    if not problem.queries:
        yield "sigma", sigma
        return
    for name, q in problem.queries:
        yield name, And(sigma, Not(q) if negate else q)


def _run(phi, sig, oracle: str, seed: Optional[int]) -> Verdict:
    if oracle == "expand":
        return solve(expand(phi), sig)
    verdict = solve(phi, sig, scan_seed=seed)
    if oracle == "both":
        other = solve(expand(phi), sig)
        if other.satisfiable != verdict.satisfiable:
            raise InternalVerificationFailure(
                f"tableau says {verdict.verdict}, expansion says {other.verdict}"
            )
    return verdict


def cmd_solve(args) -> int:
    problem = _load_problem(args.file)
    results = []
    for name, phi in _goals(problem, args.negate):
        verdict = _run(phi, problem.signature, args.oracle, args.seed)
        entry = {"query": name, "verdict": verdict.verdict}
        if verdict.satisfiable and args.verify:
            if not holds(verdict.model, verdict.model.designated, phi):
                raise InternalVerificationFailure(f"{name}: model does not satisfy the goal")
            entry["verified"] = True
        if verdict.satisfiable and args.model:
            entry["model"] = verdict.model.to_json()
        entry["stats"] = verdict.stats
        results.append(entry)
        if not args.json:
            print(f"{name}: {verdict.verdict}")
            if "model" in entry:
                print(json.dumps(entry["model"], sort_keys=False))
    if args.json:
        print(json.dumps({"file": args.file, "negate": args.negate, "results": results}))
    return EXIT_OK


def cmd_expand(args) -> int:
    problem = _load_problem(args.file)
    items = [(f"assert{k}", phi) for k, phi in enumerate(problem.assertions, 1)]
    items += problem.queries
    for name, phi in items:
        if args.size_only:
            ranges = quantifier_ranges(phi)
            print(f"{name}: {sum(ranges)} instances, size {expansion_size(phi)}")
        else:
            print(f"{name}: {render(expand(phi))}")
    return EXIT_OK


def cmd_check(args) -> int:
    problem = _load_problem(args.problem)
    model = KripkeModel.from_json(json.loads(Path(args.model).read_text()), problem.signature)
    try:
        phi = problem.query(args.query)
    except KeyError:
        _err(f"no query named {args.query!r}")
        return EXIT_USAGE
    if args.assertions:
        phi = conjoin([*problem.assertions, phi])
    print("true" if holds(model, model.designated, phi) else "false")
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_all

    return EXIT_OK if run_all(fuzz_count=args.count, seed=args.seed) else EXIT_USAGE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qkds", description="Decide QK^D_S problems.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="decide each query conjoined with the assertions")
    p.add_argument("file")
    p.add_argument("--model", action="store_true", help="print the model of SAT verdicts")
    p.add_argument("--verify", action="store_true", help="re-check SAT models by model checking")
    p.add_argument("--negate", action="store_true", help="solve the negated queries (provability)")
    p.add_argument("--json", action="store_true", help="emit one JSON document")
    p.add_argument("--oracle", choices=("tableau", "expand", "both"), default="tableau")
    p.add_argument("--seed", type=int, default=None, help="shuffle the rule scan order")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("expand", help="eliminate quantifiers")
    p.add_argument("file")
    p.add_argument("--size-only", action="store_true")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("check", help="evaluate a query in a JSON model")
    p.add_argument("model")
    p.add_argument("problem")
    p.add_argument("query")
    p.add_argument("--assertions", action="store_true", help="conjoin the assertions")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("selftest", help="run the built-in checks")
    p.add_argument("--count", type=int, default=200, help="fuzz formulas")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InternalVerificationFailure as exc:
        _err(f"verification failed: {exc}")
        return EXIT_VERIFY
    except (QKError, OSError, json.JSONDecodeError) as exc:
        _err(str(exc))
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
