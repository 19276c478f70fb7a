"""Incremental Boolean satisfiability with assumptions.

Literals use the minisat encoding: variable ``v`` has the positive literal
``2*v`` and the negative literal ``2*v + 1``; ``lit ^ 1`` negates.

:class:`Solver` is a conflict-driven clause-learning solver with two watched
literals, first-UIP learning and VSIDS scoring.  Ties are broken by variable
id and restarts are off by default, so an identical call history always
yields identical verdicts and models.  :class:`DPLLSolver` is a plain
backtracking solver with the same interface, kept as a cross-check.
"""

from __future__ import annotations

import heapq
from typing import Iterable, Optional, Sequence

from .errors import UnknownVar

UNDEF = -1


def pos(var: int) -> int:
    return var << 1


def neg(var: int) -> int:
    return var << 1 | 1


def lit(var: int, positive: bool = True) -> int:
    return var << 1 | (not positive)


def var_of(literal: int) -> int:
    return literal >> 1


def is_negative(literal: int) -> bool:
    return bool(literal & 1)


def luby(i: int) -> int:
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i %= size
    return 1 << seq


class Solver:
    def __init__(self, restarts: bool = False, var_decay: float = 0.95):
        self.restarts = restarts
        self.var_decay = var_decay
        self.clauses: list[list[int]] = []
        self.watches: list[list[int]] = []
        self.assign: list[int] = []
        self.level: list[int] = []
        self.reason: list[Optional[int]] = []
        self.activity: list[float] = []
        self.phase: list[bool] = []
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.heap: list[tuple[float, int]] = []
        self.var_inc = 1.0
        self.ok = True
        self.model: Optional[list[bool]] = None
        self.original: list[list[int]] = []
        self.stats = {"solves": 0, "conflicts": 0, "decisions": 0, "propagations": 0, "learned": 0}

    @property
    def num_vars(self) -> int:
        return len(self.assign)

    def new_var(self) -> int:
        v = len(self.assign)
        self.assign.append(UNDEF)
        self.level.append(0)
        self.reason.append(None)
        self.activity.append(0.0)
        self.phase.append(False)
        self.watches.append([])
        self.watches.append([])
        heapq.heappush(self.heap, (-0.0, v))
        return v

    def new_vars(self, n: int) -> list[int]:
        return [self.new_var() for _ in range(n)]

    # literal state: assign[v] is 1, 0 or UNDEF
    def _true(self, p):
        return self.assign[p >> 1] == (p & 1) ^ 1

    def _false(self, p):
        return self.assign[p >> 1] == (p & 1)

    def value(self, p: int) -> Optional[bool]:
        a = self.assign[p >> 1]
        return None if a == UNDEF else a == (p & 1) ^ 1

    def add_clause(self, lits: Iterable[int]) -> None:
        lits = list(dict.fromkeys(lits))
        for p in lits:
            if p < 0 or (p >> 1) >= len(self.assign):
                raise UnknownVar(f"literal {p} refers to an unallocated variable")
        self.original.append(list(lits))
        if not self.ok:
            return
        if self.trail_lim:
            self._cancel_until(0)
        present = set(lits)
        if any(p ^ 1 in present for p in lits):
            return
        keep = []
        for p in lits:
            if self._true(p):
                return
            if not self._false(p):
                keep.append(p)
        if not keep:
            self.ok = False
        elif len(keep) == 1:
            self._enqueue(keep[0], None)
            if self._propagate() is not None:
                self.ok = False
        else:
            self._attach(keep)

    def _attach(self, c: list[int]) -> int:
        ci = len(self.clauses)
        self.clauses.append(c)
        self.watches[c[0]].append(ci)
        self.watches[c[1]].append(ci)
        return ci

    def _enqueue(self, p, reason):
        v = p >> 1
        self.assign[v] = (p & 1) ^ 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(p)

    def _propagate(self) -> Optional[int]:
        assign, clauses, watches = self.assign, self.clauses, self.watches
        while self.qhead < len(self.trail):
            p = self.trail[self.qhead]
            self.qhead += 1
            self.stats["propagations"] += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            kept = []
            i, n = 0, len(ws)
            while i < n:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0], c[1] = c[1], false_lit
                first = c[0]
                if assign[first >> 1] == (first & 1) ^ 1:
                    kept.append(ci)
                    continue
                for k in range(2, len(c)):
                    q = c[k]
                    if assign[q >> 1] != (q & 1):
                        c[1], c[k] = q, false_lit
                        watches[q].append(ci)
                        break
                else:
                    kept.append(ci)
                    if assign[first >> 1] == (first & 1):
                        kept.extend(ws[i:])
                        watches[false_lit] = kept
                        self.qhead = len(self.trail)
                        return ci
                    self._enqueue(first, ci)
            watches[false_lit] = kept
        return None

    def _bump(self, v):
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            self.activity = [a * 1e-100 for a in self.activity]
            self.var_inc *= 1e-100
            self.heap = [(-self.activity[u], u) for u in range(len(self.assign)) if self.assign[u] == UNDEF]
            heapq.heapify(self.heap)

    def _analyze(self, confl: int) -> tuple[list[int], int]:
        seen = set()
        learnt = [0]
        counter = 0
        p = None
        idx = len(self.trail) - 1
        cur = len(self.trail_lim)
        clause = self.clauses[confl]
        while True:
            for q in clause if p is None else clause[1:]:
                v = q >> 1
                if v not in seen and self.level[v] > 0:
                    seen.add(v)
                    self._bump(v)
                    if self.level[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while (self.trail[idx] >> 1) not in seen:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            v = p >> 1
            seen.discard(v)
            counter -= 1
            if counter == 0:
                break
            clause = self.clauses[self.reason[v]]
        learnt[0] = p ^ 1
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda k: (self.level[learnt[k] >> 1], -k))
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, self.level[learnt[1] >> 1]

    def _cancel_until(self, lvl: int):
        if len(self.trail_lim) <= lvl:
            return
        start = self.trail_lim[lvl]
        for p in reversed(self.trail[start:]):
            v = p >> 1
            self.phase[v] = not (p & 1)
            self.assign[v] = UNDEF
            self.reason[v] = None
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    def _pick_branch(self) -> Optional[int]:
        heap = self.heap
        while heap:
            act, v = heapq.heappop(heap)
            if self.assign[v] == UNDEF and -act == self.activity[v]:
                return v
        return None

    def solve(self, assumptions: Sequence[int] = ()) -> bool:
        """True iff the clauses and ``assumptions`` are jointly satisfiable.

        On success ``self.model`` holds a total assignment.  Assumptions
        only last for this call.
        """
        self.stats["solves"] += 1
        self.model = None
        for p in assumptions:
            if (p >> 1) >= len(self.assign):
                raise UnknownVar(f"assumption {p} refers to an unallocated variable")
        if not self.ok:
            return False
        result = self._search(list(assumptions))
        self._cancel_until(0)
        return result

    def _search(self, assumptions: list[int]) -> bool:
        conflicts_since_restart = 0
        restart_round = 0
        limit = 100 * luby(restart_round)
        while True:
            confl = self._propagate()
            if confl is not None:
                self.stats["conflicts"] += 1
                conflicts_since_restart += 1
                if not self.trail_lim:
                    self.ok = False
                    return False
                learnt, back = self._analyze(confl)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], None)
                else:
                    self.stats["learned"] += 1
                    self._enqueue(learnt[0], self._attach(learnt))
                self.var_inc /= self.var_decay
                continue
            if self.restarts and conflicts_since_restart >= limit:
                restart_round += 1
                limit = 100 * luby(restart_round)
                conflicts_since_restart = 0
                self._cancel_until(0)
                continue
            if len(self.trail_lim) < len(assumptions):
                p = assumptions[len(self.trail_lim)]
                if self._false(p):
                    return False
                self.trail_lim.append(len(self.trail))
                if not self._true(p):
                    self._enqueue(p, None)
                continue
            v = self._pick_branch()
            if v is None:
                self.model = [a == 1 for a in self.assign]
                return True
            self.stats["decisions"] += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(lit(v, self.phase[v]), None)


class DPLLSolver:
    """Backtracking search with unit propagation over the raw clause list."""

    def __init__(self):
        self.original: list[list[int]] = []
        self.nvars = 0
        self.model: Optional[list[bool]] = None
        self.stats = {"solves": 0, "decisions": 0}

    @property
    def num_vars(self) -> int:
        return self.nvars

    def new_var(self) -> int:
        self.nvars += 1
        return self.nvars - 1

    def new_vars(self, n: int) -> list[int]:
        return [self.new_var() for _ in range(n)]

    def add_clause(self, lits: Iterable[int]) -> None:
        lits = list(dict.fromkeys(lits))
        for p in lits:
            if p < 0 or (p >> 1) >= self.nvars:
                raise UnknownVar(f"literal {p} refers to an unallocated variable")
        self.original.append(lits)

    def solve(self, assumptions: Sequence[int] = ()) -> bool:
        self.stats["solves"] += 1
        self.model = None
        assign: dict[int, bool] = {}
        for p in assumptions:
            v, val = p >> 1, not (p & 1)
            if assign.get(v, val) != val:
                return False
            assign[v] = val
        result = self._dpll(assign)
        if result is None:
            return False
        self.model = [result.get(v, False) for v in range(self.nvars)]
        return True

    def _dpll(self, assign):
        assign = dict(assign)
        while True:
            unit = None
            for c in self.original:
                free = None
                n_free = 0
                sat = False
                for p in c:
                    val = assign.get(p >> 1)
                    if val is None:
                        n_free += 1
                        free = p
                    elif val != bool(p & 1):
                        sat = True
                        break
                if sat:
                    continue
                if n_free == 0:
                    return None
                if n_free == 1:
                    unit = free
                    break
            if unit is None:
                break
            assign[unit >> 1] = not (unit & 1)
        for v in range(self.nvars):
            if v not in assign:
                self.stats["decisions"] += 1
                for val in (False, True):
                    assign[v] = val
                    out = self._dpll(assign)
                    if out is not None:
                        return out
                return None
        return assign


def make_solver(kind: str = "cdcl", **kwargs):
    if kind == "cdcl":
        return Solver(**kwargs)
    if kind == "dpll":
        return DPLLSolver()
    raise ValueError(f"unknown solver kind {kind!r}")


def to_dimacs(store) -> str:
    lines = [f"p cnf {store.num_vars} {len(store.original)}"]
    for c in store.original:
        nums = [-((p >> 1) + 1) if p & 1 else (p >> 1) + 1 for p in c]
        lines.append(" ".join(map(str, nums + [0])))
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str, kind: str = "cdcl"):
    store = make_solver(kind)
    pending: list[int] = []
    declared = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad DIMACS header: {line!r}")
            declared = int(parts[2])
            store.new_vars(declared)
            continue
        if declared is None:
            raise ValueError("clause before the 'p cnf' header")
        for tok in line.split():
            n = int(tok)
            if n == 0:
                store.add_clause(pending)
                pending = []
            else:
                v = abs(n) - 1
                if v >= declared:
                    raise UnknownVar(f"variable {abs(n)} exceeds the declared {declared}")
                pending.append(lit(v, n > 0))
    if pending:
        store.add_clause(pending)
    return store
