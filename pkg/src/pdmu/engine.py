"""Saturation model checker.

Every subformula occurrence ``psi`` at fixpoint level ``c`` owns one automaton
state ``(p, psi, c)`` per control ``p``; backwards modalities additionally own
``(p, psi, c, a)`` per stack letter.  The state set is allocated once, up
front, and never grows: evaluating the formula only adds transitions.
Fixpoints are computed by Kleene iteration on the transitions of the bound
variable's states.

Each subformula's states are recomputed from the current automaton and
committed together.  Reads through a bound variable may reach states that
the current round has not recomputed yet; they then see the previous
round's transitions.  A fixpoint is therefore only declared stable once a
whole round leaves every state of its body unchanged, at which point every
read has seen final values.

Target sets are kept in a canonical form before insertion:

* after the bottom marker only the empty word remains, so a target is either
  all-final (stored as ``{qeps}``) or dead (dropped);
* after any other letter ``qeps`` can no longer accept, so such a target is
  dead, and ``q*`` is dropped from any target that has other members.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

from .ama import (AMA, EPS, STAR, Denotation, Stats, insert, inter_state,
                  minimal, tuple_state)
from .mucalc import (BACKWARDS, BINDERS, And, Atom, BackBox, BackDiamond, Box,
                     Diamond, Formula, FormulaError, FormulaInfo, Mu, NegAtom,
                     Nu, Or, Var, alpha_normalize, analyze, free_vars)
from .pds import BOTTOM, PushdownSystem, pre_index

log = logging.getLogger(__name__)


class IterationLimit(RuntimeError):
    """A fixpoint did not stabilize within the configured number of rounds."""


@dataclass
class Options:
    max_iterations: int = 10_000
    record_chains: bool = False
    # Mutation hook: omit the vacuous-predecessor transitions of ~[].
    # Only used to show the differential tests can tell.
    drop_vacuous_backbox: bool = False


@dataclass
class Chain:
    """Successive automata seen by one fixpoint evaluation."""
    binder: Formula
    level: int
    states: list
    snapshots: list = field(default_factory=list)

    @property
    def greatest(self) -> bool:
        return isinstance(self.binder, Nu)


def occurrences(phi: Formula, level: int | None = None) -> list:
    """``(subformula, level)`` pairs of the syntax tree, children first.

    A binder lives one level below its context and its body shares its level;
    every other node inherits the level of its parent.
    """
    out = []

    def go(f, c):
        for child in f.children():
            go(child, c + 1 if isinstance(child, BINDERS) else c)
        out.append((f, c))

    if level is None:
        level = 1 if isinstance(phi, BINDERS) else 0
    go(phi, level)
    return out


def allocate_states(sys: PushdownSystem, info: FormulaInfo) -> tuple:
    """Fixed state set for ``info``'s formula, plus stats with ``k`` filled in."""
    states = [STAR, EPS]
    for p in sys.controls:
        for i, f in enumerate(info.subformulas):
            for c in range(info.depth + 1):
                states.append(tuple_state(p, i, c))
                if isinstance(f, BACKWARDS):
                    states.extend(inter_state(p, i, c, a) for a in sys.alphabet)
    return tuple(sorted(states)), Stats(n=0, k=len(states))


def state_bound(sys: PushdownSystem, info: FormulaInfo) -> int:
    return (len(sys.controls) * len(info.subformulas) * (info.depth + 1)
            * (len(sys.alphabet) + 2) + 2)


class Engine:
    def __init__(self, sys: PushdownSystem, phi: Formula, options: Options | None = None):
        phi = alpha_normalize(phi)
        free = free_vars(phi)
        if free:
            raise FormulaError("unbound variable(s): " + ", ".join(sorted(free)))
        for name in analyze(phi).atoms:
            sys.prop(name)
        self.sys = sys
        self.phi = phi
        self.options = options or Options()
        self.info = analyze(phi)
        self.index = {f: i for i, f in enumerate(self.info.subformulas)}
        self.pre = pre_index(sys)
        states, self.stats = allocate_states(sys, self.info)
        self.ama = AMA(states, sys.letters)
        self.chains: list = []
        self._iterations: dict = {}
        self._pending: dict = {}
        self._binders = {}
        for f, c in occurrences(phi):
            if isinstance(f, BINDERS):
                self._binders[f.var] = (f, c)

    # -- helpers -----------------------------------------------------------

    def state(self, p: str, f: Formula, c: int) -> tuple:
        return tuple_state(p, self.index[f], c)

    def inter(self, p: str, f: Formula, c: int, a: str) -> tuple:
        if a == BOTTOM:
            return EPS
        return inter_state(p, self.index[f], c, a)

    @staticmethod
    def level_of(child: Formula, c: int) -> int:
        return c + 1 if isinstance(child, BINDERS) else c

    def add(self, q: tuple, a: str, targets) -> None:
        t = frozenset(targets)
        if a == BOTTOM:
            if not t <= self.ama.finals:
                return
            t = frozenset([EPS])
        else:
            if EPS in t:
                return
            if STAR in t and len(t) > 1:
                t = t - {STAR}
        insert(self._pending.setdefault((q, a), []), t)

    def commit(self, states) -> None:
        pending, self._pending = self._pending, {}
        for q in states:
            for a in self.sys.letters:
                self.ama.replace_bucket(q, a, pending.get((q, a), ()))

    def snapshot(self, states) -> dict:
        return {(q, a): frozenset(self.ama.bucket(q, a)) for q in states for a in self.sys.letters}

    def runs(self, q: tuple, word: tuple) -> list:
        return self.ama.runs(q, word)

    def owned(self, f: Formula, c: int) -> list:
        out = [self.state(p, f, c) for p in self.sys.controls]
        if isinstance(f, BACKWARDS):
            out += [self.inter(p, f, c, a) for p in self.sys.controls for a in self.sys.alphabet]
        return out

    # -- entry point -------------------------------------------------------

    def run(self) -> Denotation:
        root_level = 1 if isinstance(self.phi, BINDERS) else 0
        self.dispatch(self.phi, root_level)
        init = {p: self.state(p, self.phi, root_level) for p in self.sys.controls}
        self.stats.iterations = [self._iterations.get(f.var, 0)
                                 for f in self.info.subformulas if isinstance(f, BINDERS)]
        self.stats.delta = self.ama.num_transitions()
        return Denotation(self.ama, init, self.stats)

    def dispatch(self, f: Formula, c: int) -> None:
        kind = type(f)
        if kind in BINDERS:
            self.op_fix(f, c)
            return
        self._dispatch_children(f, c)
        self._pending = {}
        if kind in (Atom, NegAtom):
            self.op_atom(f, c)
        elif kind is Var:
            if self._binders[f.name][1] == c:
                return  # the variable's own state family: owned by op_fix
            self.op_var(f, c)
        elif kind is And:
            self.op_and(f, c)
        elif kind is Or:
            self.op_or(f, c)
        else:
            {Diamond: self.op_diamond, Box: self.op_box,
             BackDiamond: self.op_backdiamond, BackBox: self.op_backbox}[kind](f, c)
        self.commit(self.owned(f, c))

    def _dispatch_children(self, f: Formula, c: int) -> None:
        for child in f.children():
            self.dispatch(child, self.level_of(child, c))

    # -- propositional cases ------------------------------------------------

    def op_atom(self, f: Formula, c: int) -> None:
        heads = self.sys.prop(f.name)
        if isinstance(f, NegAtom):
            heads = set(self.sys.heads) - heads
        for p, a in sorted(heads):
            self.add(self.state(p, f, c), a, [EPS if a == BOTTOM else STAR])

    def op_and(self, f: And, c: int) -> None:
        cl, cr = self.level_of(f.left, c), self.level_of(f.right, c)
        for p in self.sys.controls:
            q, l, r = self.state(p, f, c), self.state(p, f.left, cl), self.state(p, f.right, cr)
            for a in self.sys.letters:
                for t1, t2 in itertools.product(self.ama.sorted_bucket(l, a), self.ama.sorted_bucket(r, a)):
                    self.add(q, a, t1 | t2)

    def op_or(self, f: Or, c: int) -> None:
        for p in self.sys.controls:
            q = self.state(p, f, c)
            for g in (f.left, f.right):
                s = self.state(p, g, self.level_of(g, c))
                for a in self.sys.letters:
                    for t in self.ama.sorted_bucket(s, a):
                        self.add(q, a, t)

    def op_var(self, f: Var, c: int) -> None:
        binder, d = self._binders[f.name]
        for p in self.sys.controls:
            src, dst = self.state(p, f, d), self.state(p, f, c)
            for a in self.sys.letters:
                for t in self.ama.sorted_bucket(src, a):
                    self.add(dst, a, t)

    # -- forwards modalities ------------------------------------------------

    def _successor_runs(self, cmd, sub: Formula, c1: int) -> list:
        """Target sets after ``cmd`` fires: the child state for the new
        control must read the letters ``cmd`` put on the stack."""
        q = self.state(cmd.target, sub, c1)
        if not cmd.word:
            return [frozenset([q])]
        return self.runs(q, cmd.word)

    def op_diamond(self, f: Diamond, c: int) -> None:
        c1 = self.level_of(f.sub, c)
        for cmd in self.sys.commands:
            q = self.state(cmd.control, f, c)
            for t in self._successor_runs(cmd, f.sub, c1):
                self.add(q, cmd.letter, t)

    def op_box(self, f: Box, c: int) -> None:
        c1 = self.level_of(f.sub, c)
        for p, a in self.sys.heads:
            q = self.state(p, f, c)
            cmds = self.sys.commands_from(p, a)
            if not cmds:
                self.add(q, a, [EPS if a == BOTTOM else STAR])
                continue
            combos = [frozenset()]
            for cmd in cmds:
                combos = minimal(r | t for r in combos for t in self._successor_runs(cmd, f.sub, c1))
                if not combos:
                    break
            for t in combos:
                self.add(q, a, t)

    # -- backwards modalities -----------------------------------------------

    def op_backdiamond(self, f: BackDiamond, c: int) -> None:
        c1 = self.level_of(f.sub, c)
        child = lambda p: self.state(p, f.sub, c1)
        for p in self.sys.controls:
            q = self.state(p, f, c)
            for a in self.sys.letters:
                for p1, a1 in sorted(self.pre.pop(p)):
                    for t in self.runs(child(p1), (a1, a)):
                        self.add(q, a, t)
                for p1, a1 in sorted(self.pre.rew(p, a)):
                    for t in self.runs(child(p1), (a1,)):
                        self.add(q, a, t)
                if a == BOTTOM:
                    continue
                mid = self.inter(p, f, c, a)
                self.add(q, a, [mid])
                for b in self.sys.alphabet:
                    for p1, a1 in sorted(self.pre.push(p, a, b)):
                        for t in self.runs(child(p1), (a1,)):
                            self.add(mid, b, t)

    def op_backbox(self, f: BackBox, c: int) -> None:
        c1 = self.level_of(f.sub, c)
        child = lambda p: self.state(p, f.sub, c1)
        vacuous = not self.options.drop_vacuous_backbox
        letters = self.sys.letters
        for p in self.sys.controls:
            q = self.state(p, f, c)
            for a in letters:
                # every pop- and rewrite-predecessor must satisfy the child;
                # push-predecessors are checked one letter later by the
                # intermediate state
                combos = [frozenset([self.inter(p, f, c, a)])]
                for p1, a1 in sorted(self.pre.pop(p)):
                    combos = minimal(r | t for r in combos for t in self.runs(child(p1), (a1, a)))
                for p1, a1 in sorted(self.pre.rew(p, a)):
                    combos = minimal(r | t for r in combos for t in self.runs(child(p1), (a1,)))
                for t in combos:
                    self.add(q, a, t)
                if vacuous and not any(self.pre.pre(p, a, b) for b in letters):
                    self.add(q, a, [EPS if a == BOTTOM else STAR])
            for a in self.sys.alphabet:
                mid = self.inter(p, f, c, a)
                for b in self.sys.alphabet:
                    preds = sorted(self.pre.push(p, a, b))
                    if not preds:
                        if vacuous:
                            self.add(mid, b, [STAR])
                        continue
                    combos = [frozenset()]
                    for p1, a1 in preds:
                        combos = minimal(r | t for r in combos for t in self.runs(child(p1), (a1,)))
                    for t in combos:
                        self.add(mid, b, t)
                if vacuous:
                    self.add(mid, BOTTOM, [EPS])

    # -- fixpoints ----------------------------------------------------------

    def op_fix(self, f: Formula, d: int) -> None:
        var = Var(f.var)
        family = [self.state(p, var, d) for p in self.sys.controls] if var in self.index else []
        fam = set(family)
        scope = []
        for g, c in occurrences(f.body, self.level_of(f.body, d)):
            scope.extend(s for s in self.owned(g, c) if s not in fam)
        scope = list(dict.fromkeys(scope))

        for q in family:
            for a in self.sys.letters:
                if isinstance(f, Nu):
                    self.ama.replace_bucket(q, a, [frozenset([EPS if a == BOTTOM else STAR])])
                else:
                    self.ama.replace_bucket(q, a, ())

        chain = None
        if self.options.record_chains and family:
            chain = Chain(f, d, family, [self.ama.copy()])
            self.chains.append(chain)

        cb = self.level_of(f.body, d)
        body = [self.state(p, f.body, cb) for p in self.sys.controls]
        rounds = 0
        while True:
            rounds += 1
            if rounds > self.options.max_iterations:
                raise IterationLimit(
                    f"fixpoint {'mu' if isinstance(f, Mu) else 'nu'} {f.var} at level {d} "
                    f"did not stabilize within {self.options.max_iterations} iterations")
            before = self.snapshot(scope)
            self.dispatch(f.body, cb)
            settled = all(
                set(self.ama.bucket(b, a)) == set(self.ama.bucket(z, a))
                for b, z in zip(body, family) for a in self.sys.letters)
            if settled and self.snapshot(scope) == before:
                break
            for b, z in zip(body, family):
                for a in self.sys.letters:
                    self.ama.replace_bucket(z, a, self.ama.sorted_bucket(b, a))
            if chain is not None and not settled:
                chain.snapshots.append(self.ama.copy())

        self._iterations[f.var] = max(self._iterations.get(f.var, 0), rounds)
        log.debug("fixpoint %s at level %d stable after %d rounds", f.var, d, rounds)
        self._pending = {}
        for p, b in zip(self.sys.controls, body):
            for a in self.sys.letters:
                for t in self.ama.sorted_bucket(b, a):
                    self.add(self.state(p, f, d), a, t)
        self.commit([self.state(p, f, d) for p in self.sys.controls])


def model_check(sys: PushdownSystem, phi: Formula, options: Options | None = None) -> Denotation:
    """Automaton accepting exactly the configurations of ``sys`` satisfying ``phi``."""
    return Engine(sys, phi, options).run()
