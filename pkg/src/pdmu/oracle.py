"""Reference semantics used to cross-check the saturation engine.

Two families, neither sharing code with the alternating construction:

* for rewrite-only systems every configuration's neighbours keep its stack
  below the top letter, so truth depends only on the head and the formula
  can be evaluated on the finite graph of heads;
* for arbitrary systems, classical (non-alternating) pre*/post* saturation
  gives the exact reachability sets that the fixpoint formulas
  ``mu Z. A \\/ <>Z``, ``mu Z. A \\/ ~<>Z`` and their duals denote.
"""
from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .mucalc import (And, Atom, BackBox, BackDiamond, Box, Diamond, Formula,
                     Mu, NegAtom, Nu, Or, Var, free_vars)
from .pds import BOTTOM, Configuration, PushdownSystem


class OracleError(ValueError):
    pass


# --- finite head graph -------------------------------------------------------

@dataclass(frozen=True)
class Kripke:
    states: frozenset
    edges: frozenset
    labels: dict = field(default_factory=dict)

    def successors(self) -> dict:
        out = defaultdict(set)
        for s, t in self.edges:
            out[s].add(t)
        return out

    def predecessors(self) -> dict:
        out = defaultdict(set)
        for s, t in self.edges:
            out[t].add(s)
        return out


def head_kripke(sys: PushdownSystem) -> Kripke:
    bad = [c for c in sys.commands if len(c.word) != 1]
    if bad:
        raise OracleError(f"head graph needs a rewrite-only system; found {bad[0].kind} rule {bad[0]}")
    edges = frozenset(((c.control, c.letter), (c.target, c.word[0])) for c in sys.commands)
    return Kripke(frozenset(sys.heads), edges, dict(sys.props))


def kripke_eval(k: Kripke, phi: Formula, env: dict | None = None) -> frozenset:
    succ, pred = k.successors(), k.predecessors()
    universe = k.states

    def ev(f: Formula, env: dict) -> frozenset:
        if isinstance(f, Atom):
            return frozenset(k.labels[f.name]) & universe
        if isinstance(f, NegAtom):
            return universe - k.labels[f.name]
        if isinstance(f, Var):
            return env[f.name]
        if isinstance(f, And):
            return ev(f.left, env) & ev(f.right, env)
        if isinstance(f, Or):
            return ev(f.left, env) | ev(f.right, env)
        if isinstance(f, (Box, Diamond, BackBox, BackDiamond)):
            inner = ev(f.sub, env)
            rel = succ if isinstance(f, (Box, Diamond)) else pred
            if isinstance(f, (Diamond, BackDiamond)):
                return frozenset(s for s in universe if rel.get(s, set()) & inner)
            return frozenset(s for s in universe if rel.get(s, set()) <= inner)
        current = frozenset() if isinstance(f, Mu) else universe
        for _ in range(len(universe) + 2):
            nxt = ev(f.body, {**env, f.var: current})
            if nxt == current:
                return current
            current = nxt
        raise AssertionError("finite fixpoint failed to stabilize")

    return ev(phi, dict(env or {}))


# --- classical multi-automata ------------------------------------------------

class MultiAutomaton:
    """Non-alternating automaton with one initial state per control.

    Control states have no incoming transitions; epsilon moves only leave
    control states.
    """

    def __init__(self, sys: PushdownSystem, heads: Iterable[tuple]):
        self.sys = sys
        self.trans: dict = defaultdict(set)
        self.eps: dict = defaultdict(set)
        self.final = ("F",)
        universal = ("U",)
        for a in sys.alphabet:
            self.trans[(universal, a)].add(universal)
        self.trans[(universal, BOTTOM)].add(self.final)
        for p, a in heads:
            self.trans[(("c", p), a)].add(self.final if a == BOTTOM else universal)

    def read(self, start: Iterable[tuple], word: Iterable[str]) -> set:
        current = set(start)
        for a in word:
            current = {r for s in current for r in self.trans.get((s, a), ())}
            if not current:
                break
        return current

    def closure(self, p: str) -> set:
        return {("c", p)} | self.eps.get(("c", p), set())

    def accepts(self, c: Configuration) -> bool:
        return self.final in self.read(self.closure(c.control), c.stack)

    def _add(self, table: dict, key, targets: set) -> bool:
        before = len(table[key])
        table[key] |= targets
        return len(table[key]) != before


def prestar(sys: PushdownSystem, target: Iterable[tuple]) -> MultiAutomaton:
    """Configurations that can reach a ``target``-headed configuration."""
    m = MultiAutomaton(sys, target)
    changed = True
    while changed:
        changed = False
        for cmd in sys.commands:
            reached = m.read([("c", cmd.target)], cmd.word)
            if m._add(m.trans, (("c", cmd.control), cmd.letter), reached):
                changed = True
    return m


def poststar(sys: PushdownSystem, source: Iterable[tuple]) -> MultiAutomaton:
    """Configurations reachable from a ``source``-headed configuration."""
    m = MultiAutomaton(sys, source)
    changed = True
    while changed:
        changed = False
        for cmd in sys.commands:
            after = m.read(m.closure(cmd.control), [cmd.letter])
            dst = ("c", cmd.target)
            if not cmd.word:
                changed |= m._add(m.eps, dst, after)
            elif len(cmd.word) == 1:
                changed |= m._add(m.trans, (dst, cmd.word[0]), after)
            else:
                mid = ("m", cmd.target, cmd.word[0])
                changed |= m._add(m.trans, (dst, cmd.word[0]), {mid})
                changed |= m._add(m.trans, (mid, cmd.word[1]), after)
    return m


# --- formula-shaped oracles --------------------------------------------------

def head_set(sys: PushdownSystem, f: Formula) -> frozenset | None:
    """Heads satisfying a modality-free, binder-free formula, else None."""
    if isinstance(f, Atom):
        return sys.prop(f.name)
    if isinstance(f, NegAtom):
        return frozenset(sys.heads) - sys.prop(f.name)
    if isinstance(f, (And, Or)):
        left, right = head_set(sys, f.left), head_set(sys, f.right)
        if left is None or right is None:
            return None
        return left & right if isinstance(f, And) else left | right
    return None


def _split(body: Formula, var: str, junction: type, modality: type):
    if not isinstance(body, junction):
        return None
    for prop, step in ((body.left, body.right), (body.right, body.left)):
        if step == modality(Var(var)) and var not in free_vars(prop):
            return prop
    return None


def reach_oracle(sys: PushdownSystem, phi: Formula, mode: str) -> Callable:
    """Membership test for the reachability-shaped formulas.

    ``prestar`` mode handles ``mu Z. A \\/ <>Z`` and ``nu Z. A /\\ []Z``;
    ``poststar`` mode handles ``mu Z. A \\/ ~<>Z`` and ``nu Z. A /\\ ~[]Z``,
    with ``A`` propositional.
    """
    forward = mode == "prestar"
    build = prestar if forward else poststar
    shapes = ((Mu, Or, Diamond if forward else BackDiamond, False),
              (Nu, And, Box if forward else BackBox, True))
    for binder, junction, modality, dual in shapes:
        if isinstance(phi, binder):
            prop = _split(phi.body, phi.var, junction, modality)
            heads = head_set(sys, prop) if prop is not None else None
            if heads is None:
                continue
            if dual:
                m = build(sys, frozenset(sys.heads) - heads)
                return lambda c: not m.accepts(c)
            m = build(sys, heads)
            return m.accepts
    raise OracleError(f"{mode} mode expects 'mu Z. A \\/ {'<>' if forward else '~<>'}Z' or "
                      f"'nu Z. A /\\ {'[]' if forward else '~[]'}Z' with A propositional; got {phi}")


def kripke_oracle(sys: PushdownSystem, phi: Formula) -> Callable:
    sat = kripke_eval(head_kripke(sys), phi)
    return lambda c: c.head in sat


# --- differential harness ----------------------------------------------------

MODES = ("kripke", "prestar", "poststar")


def diff_check(sys: PushdownSystem, phi: Formula, mode: str = "kripke", max_depth: int = 3,
               samples: int | None = None, seed: int = 0, options=None, denotation=None) -> dict:
    """Compare engine membership with an oracle on every configuration of
    stack depth ``<= max_depth`` (or ``samples`` of them, drawn with ``seed``)."""
    from .engine import model_check

    if mode == "kripke":
        oracle = kripke_oracle(sys, phi)
    elif mode in ("prestar", "poststar"):
        oracle = reach_oracle(sys, phi, mode)
    else:
        raise OracleError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    d = denotation if denotation is not None else model_check(sys, phi, options)
    configs = sys.configurations(max_depth)
    if samples is not None and samples < len(configs):
        configs = sorted(random.Random(seed).sample(configs, samples))
    memo: dict = {}
    bad = []
    for c in configs:
        got, want = d.accepts(c, memo), bool(oracle(c))
        if got != want:
            bad.append((len(c.stack), c, got, want))
    bad.sort()
    rows = [{"config": str(c), "engine": got, "oracle": want} for _, c, got, want in bad]
    return {"cases": len(configs), "disagreements": rows, "seed": seed}
