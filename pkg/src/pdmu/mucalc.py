"""Positive-form modal mu-calculus with forwards and backwards modalities.

Concrete syntax (binders bind weakest, then ``\\/``, then ``/\\``)::

    mu Z. x \\/ ~<>Z        least fixpoint, backwards diamond
    nu Z. !x /\\ []Z        greatest fixpoint, negated atom, box
    tt, ff                  sugar for nu Z.Z and mu Z.Z

``<>`` / ``[]`` quantify over successors, ``~<>`` / ``~[]`` over predecessors.
Atoms are lowercase identifiers, variables start with an uppercase letter.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator


class FormulaError(ValueError):
    pass


@dataclass(frozen=True)
class Formula:
    def children(self) -> tuple:
        return ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class NegAtom(Formula):
    name: str


@dataclass(frozen=True)
class Var(Formula):
    name: str


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Box(Formula):
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class Diamond(Formula):
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class BackBox(Formula):
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class BackDiamond(Formula):
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class Mu(Formula):
    var: str
    body: Formula

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Nu(Formula):
    var: str
    body: Formula

    def children(self):
        return (self.body,)


BINARY = (And, Or)
MODAL = (Box, Diamond, BackBox, BackDiamond)
BINDERS = (Mu, Nu)
BACKWARDS = (BackBox, BackDiamond)

_DUAL = {Atom: NegAtom, NegAtom: Atom, And: Or, Or: And, Box: Diamond, Diamond: Box,
         BackBox: BackDiamond, BackDiamond: BackBox, Mu: Nu, Nu: Mu}

_PREFIX = {Diamond: "<>", Box: "[]", BackDiamond: "~<>", BackBox: "~[]"}


def tt() -> Formula:
    return Nu("Z", Var("Z"))


def ff() -> Formula:
    return Mu("Z", Var("Z"))


# --- parsing ---------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(~<>|~\[\]|<>|\[\]|\\/|/\\|[!().])|([A-Za-z_][A-Za-z0-9_']*))")
_KEYWORDS = {"mu", "nu", "tt", "ff"}


def _tokenize(text: str) -> list:
    tokens, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaError(f"syntax error at column {pos + 1}: unexpected {text[pos:].strip()[:10]!r}")
        tokens.append((m.group(1) or m.group(2), pos + 1))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def take(self, expected: str | None = None) -> str:
        if self.i >= len(self.tokens):
            raise FormulaError(f"syntax error: unexpected end of formula"
                               + (f", expected {expected!r}" if expected else ""))
        tok, col = self.tokens[self.i]
        if expected is not None and tok != expected:
            raise FormulaError(f"syntax error at column {col}: expected {expected!r}, got {tok!r}")
        self.i += 1
        return tok

    def formula(self) -> Formula:
        if self.peek() in ("mu", "nu"):
            kind = Mu if self.take() == "mu" else Nu
            var = self.take()
            if not var[0].isupper():
                raise FormulaError(f"binder variable must start uppercase, got {var!r}")
            self.take(".")
            return kind(var, self.formula())
        return self.disj()

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek() == "\\/":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.prefix()
        while self.peek() == "/\\":
            self.take()
            f = And(f, self.prefix())
        return f

    def prefix(self) -> Formula:
        tok = self.peek()
        ops = {"<>": Diamond, "[]": Box, "~<>": BackDiamond, "~[]": BackBox}
        if tok in ops:
            self.take()
            return ops[tok](self.prefix())
        if tok in ("mu", "nu"):
            return self.formula()
        if tok == "!":
            self.take()
            nxt = self.peek()
            if nxt is None or not nxt[0].islower() or nxt in _KEYWORDS:
                raise FormulaError("negation only on atoms")
            return NegAtom(self.take())
        if tok == "(":
            self.take()
            f = self.formula()
            self.take(")")
            return f
        if tok == "tt":
            self.take()
            return tt()
        if tok == "ff":
            self.take()
            return ff()
        if tok is not None and (tok[0].isalpha() or tok[0] == "_"):
            self.take()
            return Var(tok) if tok[0].isupper() else Atom(tok)
        self.take("formula")  # raises with position
        raise AssertionError


def parse_formula(text: str, closed: bool = False) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if p.peek() is not None:
        tok, col = p.tokens[p.i]
        raise FormulaError(f"syntax error at column {col}: unexpected {tok!r}")
    f = alpha_normalize(f)
    if closed:
        free = free_vars(f)
        if free:
            raise FormulaError("unbound variable(s): " + ", ".join(sorted(free)))
    return f


# --- structure -------------------------------------------------------------

def walk(f: Formula) -> Iterator[Formula]:
    """Postorder traversal (children before parents), duplicates included."""
    for c in f.children():
        yield from walk(c)
    yield f


def free_vars(f: Formula) -> frozenset:
    if isinstance(f, Var):
        return frozenset([f.name])
    if isinstance(f, BINDERS):
        return free_vars(f.body) - {f.var}
    out = frozenset()
    for c in f.children():
        out |= free_vars(c)
    return out


def alpha_normalize(f: Formula) -> Formula:
    """Rename binders so that no two binders share a variable name and no
    binder reuses the name of a free variable."""
    used = set(free_vars(f))

    def fresh(name: str) -> str:
        if name not in used:
            used.add(name)
            return name
        k = 1
        while f"{name}{k}" in used:
            k += 1
        used.add(f"{name}{k}")
        return f"{name}{k}"

    def go(g: Formula, env: dict) -> Formula:
        if isinstance(g, Var):
            return Var(env.get(g.name, g.name))
        if isinstance(g, BINDERS):
            new = fresh(g.var)
            return type(g)(new, go(g.body, {**env, g.var: new}))
        if isinstance(g, BINARY):
            return type(g)(go(g.left, env), go(g.right, env))
        if isinstance(g, MODAL):
            return type(g)(go(g.sub, env))
        return g

    return go(f, {})


@dataclass(frozen=True)
class FormulaInfo:
    subformulas: tuple
    depth: int
    free: frozenset
    atoms: frozenset

    def index(self, f: Formula) -> int:
        return self.subformulas.index(f)


def nesting_depth(f: Formula) -> int:
    inner = max((nesting_depth(c) for c in f.children()), default=0)
    return inner + 1 if isinstance(f, BINDERS) else inner


def analyze(f: Formula) -> FormulaInfo:
    subs = tuple(dict.fromkeys(walk(f)))
    atoms = frozenset(g.name for g in subs if isinstance(g, (Atom, NegAtom)))
    return FormulaInfo(subs, nesting_depth(f), free_vars(f), atoms)


def size(f: Formula) -> int:
    return sum(1 for _ in walk(f))


def negate(f: Formula) -> Formula:
    """Positive-form dual of a closed formula."""
    if free_vars(f):
        raise FormulaError("negate needs a closed formula; free: " + ", ".join(sorted(free_vars(f))))
    return _dual(f)


def _dual(f: Formula) -> Formula:
    kind = type(f)
    if kind is Var:
        return f
    if kind in (Atom, NegAtom):
        return _DUAL[kind](f.name)
    if kind in BINARY:
        return _DUAL[kind](_dual(f.left), _dual(f.right))
    if kind in MODAL:
        return _DUAL[kind](_dual(f.sub))
    return _DUAL[kind](f.var, _dual(f.body))


# --- printing --------------------------------------------------------------

def to_text(f: Formula) -> str:
    return _show(f, 0)


def _show(f: Formula, ctx: int) -> str:
    # ctx: 0 anywhere, 1 left of an infix op, 2 operand of a conj, 3 operand of a prefix op
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, NegAtom):
        return "!" + f.name
    if isinstance(f, Var):
        return f.name
    if isinstance(f, BINDERS):
        s = f"{'mu' if isinstance(f, Mu) else 'nu'} {f.var}. {_show(f.body, 0)}"
        return f"({s})" if ctx else s
    if isinstance(f, Or):
        s = f"{_show(f.left, 1)} \\/ {_show(f.right, 2)}"
        return f"({s})" if ctx >= 2 else s
    if isinstance(f, And):
        s = f"{_show(f.left, 2)} /\\ {_show(f.right, 3)}"
        return f"({s})" if ctx >= 3 else s
    return _PREFIX[type(f)] + _show(f.sub, 3)
