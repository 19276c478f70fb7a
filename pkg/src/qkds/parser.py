"""Concrete syntax: formula parser, problem files and a fully parenthesizing printer.

Binding strength, tightest first: ``[s]``/``<s>``, ``~``, ``|``, ``&``, ``->``
(right-associative), ``<->``.  Note that ``|`` binds tighter than ``&``.

Problem files are line oriented::

    atoms: o1 o2 r1
    assert: [o1] laneBlocked
    query q1: forall x (<x> true)
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

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
    conjoin,
    is_closed,
    mk_instance,
)
from .errors import (
    EmptyInstance,
    FormulaSyntaxError,
    MalformedBounds,
    MissingAtomsHeader,
    OpenFormulaAssertion,
)

KEYWORDS = frozenset({"false", "true", "forall", "exists", "x", "atoms", "assert", "query"})

_TOKEN = re.compile(r"(<->|->|<=|[~&|\[\]<>{}(),])|([A-Za-z][A-Za-z0-9_]*)")
_SPACE = re.compile(r"\s*")


@dataclass(frozen=True)
class Token:
    kind: str  # "op", "kw", "ident" or "eof"
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = _SPACE.match(text, 0).end()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(pos, "a token", text[pos])
        if m.group(1):
            tokens.append(Token("op", m.group(1), pos))
        else:
            word = m.group(2)
            tokens.append(Token("kw" if word in KEYWORDS else "ident", word, pos))
        pos = _SPACE.match(text, m.end()).end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, sig: Signature):
        self.tokens = tokenize(text)
        self.sig = sig
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def at(self, text):
        return self.tok.text == text and self.tok.kind in ("op", "kw")

    def advance(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    def expect(self, text) -> Token:
        if not self.at(text):
            self.fail(repr(text))
        return self.advance()

    def fail(self, expected, cls=FormulaSyntaxError):
        tok = self.tok
        raise cls(tok.pos, expected, tok.text if tok.kind != "eof" else "end of input")

    def parse(self) -> Formula:
        phi = self.iff()
        if self.tok.kind != "eof":
            self.fail("end of input")
        return phi

    def iff(self):
        left = self.implies()
        while self.at("<->"):
            self.advance()
            left = Iff(left, self.implies())
        return left

    def implies(self):
        left = self.conj()
        if self.at("->"):
            self.advance()
            return Implies(left, self.implies())
        return left

    def conj(self):
        left = self.disj()
        while self.at("&"):
            self.advance()
            left = And(left, self.disj())
        return left

    def disj(self):
        left = self.unary()
        while self.at("|"):
            self.advance()
            left = Or(left, self.unary())
        return left

    def unary(self):
        if self.at("~"):
            self.advance()
            return Not(self.unary())
        if self.at("["):
            self.advance()
            mod = self.modality("]")
            return Box(mod, self.unary())
        if self.at("<"):
            self.advance()
            mod = self.modality(">")
            return Diamond(mod, self.unary())
        return self.primary()

    def modality(self, close):
        if self.at("x"):
            self.advance()
            self.expect(close)
            return X
        return self.instance_body(close)

    def instance_body(self, close) -> Instance:
        start = self.tok.pos
        names = []
        if self.at(close):
            raise EmptyInstance(f"offset {start}: empty instance")
        while True:
            if self.tok.kind != "ident":
                self.fail("an atom name")
            names.append(self.advance().text)
            if self.at(","):
                self.advance()
                continue
            self.expect(close)
            return mk_instance(names, self.sig)

    def braced(self) -> Instance:
        self.expect("{")
        return self.instance_body("}")

    def primary(self):
        tok = self.tok
        if self.at("true"):
            self.advance()
            return Top()
        if self.at("false"):
            self.advance()
            return Bottom()
        if tok.kind == "ident":
            self.advance()
            return Var(tok.text)
        if self.at("("):
            self.advance()
            phi = self.iff()
            self.expect(")")
            return phi
        if self.at("forall") or self.at("exists"):
            return self.quantifier()
        self.fail("a formula")

    def quantifier(self):
        node = ForAll if self.advance().text == "forall" else Exists
        lower: Optional[Instance] = None
        upper: Optional[Instance] = None
        if self.at("x"):
            self.advance()
            if self.at("<="):
                self.advance()
                upper = self.braced()
        elif self.at("{"):
            lower = self.braced()
            self.expect("<=")
            self.expect("x")
            if self.at("<="):
                self.advance()
                upper = self.braced()
        else:
            self.fail("'x' or a lower bound")
        if self.at("<="):
            self.fail("'(' after the upper bound", MalformedBounds)
        self.expect("(")
        body = self.iff()
        self.expect(")")
        return node(lower, upper if upper is not None else self.sig.full, body)


def parse_formula(text: str, sig: Signature) -> Formula:
    return _Parser(text, sig).parse()


@dataclass
class Problem:
    signature: Signature
    assertions: list[Formula] = field(default_factory=list)
    queries: list[tuple[str, Formula]] = field(default_factory=list)

    def conjunction(self) -> Formula:
        return conjoin(self.assertions)

    def query(self, name: str) -> Formula:
        for qname, phi in self.queries:
            if qname == name:
                return phi
        raise KeyError(name)

    @property
    def query_names(self) -> list[str]:
        return [name for name, _ in self.queries]


_LINE = re.compile(r"^(atoms|assert|query)(?:\s+([A-Za-z][A-Za-z0-9_]*))?\s*:(.*)$")


def parse_problem(text: str) -> Problem:
    sig: Optional[Signature] = None
    problem: Optional[Problem] = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise FormulaSyntaxError(0, "'atoms:', 'assert:' or 'query:'", line, lineno)
        key, name, rest = m.group(1), m.group(2), m.group(3)
        if key == "atoms":
            if problem is not None:
                raise FormulaSyntaxError(0, "a single atoms header", line, lineno)
            if name is not None:
                raise FormulaSyntaxError(0, "'atoms:'", line, lineno)
            try:
                sig = Signature(tuple(rest.split()))
            except ValueError as exc:
                raise FormulaSyntaxError(0, f"a valid atom list ({exc})", rest, lineno) from None
            for atom in sig.atoms:
                if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", atom) or atom in KEYWORDS:
                    raise FormulaSyntaxError(0, "an atom identifier", atom, lineno)
            problem = Problem(sig)
            continue
        if problem is None:
            raise MissingAtomsHeader(f"line {lineno}: '{key}' before the atoms header")
        if key == "assert" and name is not None:
            raise FormulaSyntaxError(0, "'assert:'", line, lineno)
        try:
            phi = parse_formula(rest, sig)
        except FormulaSyntaxError as exc:
            exc.line = lineno
            exc.args = (exc._message(),)
            raise
        if not is_closed(phi):
            raise OpenFormulaAssertion(f"line {lineno}: free variable modality x in {key}")
        if key == "assert":
            problem.assertions.append(phi)
        else:
            qname = name or f"q{len(problem.queries) + 1}"
            if qname in problem.query_names:
                raise FormulaSyntaxError(0, "a fresh query name", qname, lineno)
            problem.queries.append((qname, phi))
    if problem is None:
        raise MissingAtomsHeader("no atoms header")
    return problem


def _render_mod(mod) -> str:
    return "x" if mod is X else ",".join(mod.names)


_BIN_OPS = {And: "&", Or: "|", Implies: "->", Iff: "<->"}


def _operand(phi: Formula) -> str:
    # binary nodes already carry their own parentheses
    text = render(phi)
    return text if isinstance(phi, (And, Or, Implies, Iff)) else f"({text})"


def render(phi: Formula) -> str:
    """Fully parenthesized text that parses back to the same tree."""
    match phi:
        case Top():
            return "true"
        case Bottom():
            return "false"
        case Var(name):
            return name
        case Lit(name, positive):
            return name if positive else f"~({name})"
        case Not(sub):
            return f"~({render(sub)})"
        case And(l, r) | Or(l, r) | Implies(l, r) | Iff(l, r):
            return f"({_operand(l)} {_BIN_OPS[type(phi)]} {_operand(r)})"
        case Box(mod, sub):
            return f"[{_render_mod(mod)}] ({render(sub)})"
        case Diamond(mod, sub):
            return f"<{_render_mod(mod)}> ({render(sub)})"
        case ForAll(lo, up, body) | Exists(lo, up, body):
            kw = "forall" if isinstance(phi, ForAll) else "exists"
            low = f"{{{','.join(lo.names)}}} <= " if lo is not None else ""
            return f"{kw} {low}x <= {{{','.join(up.names)}}} ({render(body)})"
    raise TypeError(f"not a formula: {phi!r}")


def render_problem(problem: Problem) -> str:
    lines = ["atoms: " + " ".join(problem.signature.atoms)]
    lines += [f"assert: {render(phi)}" for phi in problem.assertions]
    lines += [f"query {name}: {render(phi)}" for name, phi in problem.queries]
    return "\n".join(lines) + "\n"
