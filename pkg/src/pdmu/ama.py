"""Alternating multi-automata over stack words.

A transition ``(q, a, Q)`` reads one letter and obliges *every* state of the
target set ``Q`` to accept the rest of the word.  A configuration
``<p, w$>`` is accepted from ``init[p]`` when some choice of transitions
consumes all of ``w$`` (the bottom marker included) and leaves only final
states.  Within a ``(state, letter)`` bucket targets are kept as a
subset-antichain: a target that contains another one is redundant.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from typing import Iterable, Mapping

from .pds import BOTTOM, Configuration

STAR = ("*",)       # accepts every remainder
EPS = ("eps",)      # accepts only the empty remainder
SPECIALS = (STAR, EPS)


class AmaError(ValueError):
    pass


def tuple_state(control: str, sub: int, level: int) -> tuple:
    return ("t", control, sub, level)


def inter_state(control: str, sub: int, level: int, letter: str) -> tuple:
    return ("i", control, sub, level, letter)


def valuation_state(k: int) -> tuple:
    return ("v", k)


def state_label(q: tuple) -> str:
    if q == STAR:
        return "q*"
    if q == EPS:
        return "qeps"
    return "(" + ",".join(str(x) for x in q[1:]) + ")"


def _set_key(s: frozenset) -> tuple:
    return (len(s), tuple(sorted(s)))


@dataclass
class Stats:
    n: int = 0
    k: int = 0
    iterations: list = field(default_factory=list)
    delta: int = 0

    def line(self) -> str:
        iters = ",".join(str(i) for i in self.iterations)
        return f"n={self.n} k={self.k} iters=[{iters}] delta={self.delta}"


class AMA:
    def __init__(self, states: Iterable[tuple], alphabet: Iterable[str],
                 finals: Iterable[tuple] = SPECIALS, special: bool = True):
        self.states = tuple(sorted(set(states) | (set(SPECIALS) if special else set())))
        self._known = frozenset(self.states)
        self.alphabet = tuple(alphabet)
        self.finals = frozenset(finals)
        self.delta: dict = {}
        if special:
            for a in self.alphabet:
                self.delta[(STAR, a)] = [frozenset([STAR])]

    # -- mutation ----------------------------------------------------------

    def add_transition(self, q: tuple, a: str, targets: Iterable[tuple]) -> bool:
        """Insert ``(q, a, targets)`` keeping the bucket a subset-antichain.

        Returns True when the bucket changed.
        """
        targets = frozenset(targets)
        if q not in self._known or not targets <= self._known:
            unknown = [s for s in (q, *targets) if s not in self._known]
            raise AmaError(f"unknown state(s): {', '.join(map(state_label, unknown))}")
        bucket = self.delta.setdefault((q, a), [])
        return insert(bucket, targets)

    def replace_bucket(self, q: tuple, a: str, targets: Iterable[frozenset]) -> None:
        """Overwrite the ``(q, a)`` bucket in one go."""
        bucket: list = []
        for t in targets:
            if not t <= self._known:
                raise AmaError(f"unknown state(s) in target {sorted(t)}")
            insert(bucket, t)
        if q not in self._known:
            raise AmaError(f"unknown state {state_label(q)}")
        if bucket:
            self.delta[(q, a)] = bucket
        else:
            self.delta.pop((q, a), None)

    def clear(self, q: tuple) -> None:
        for a in self.alphabet:
            self.delta.pop((q, a), None)

    def copy(self) -> "AMA":
        other = AMA.__new__(AMA)
        other.states, other._known = self.states, self._known
        other.alphabet, other.finals = self.alphabet, self.finals
        other.delta = {k: list(v) for k, v in self.delta.items()}
        return other

    # -- queries -----------------------------------------------------------

    def bucket(self, q: tuple, a: str) -> list:
        return self.delta.get((q, a), [])

    def sorted_bucket(self, q: tuple, a: str) -> list:
        return sorted(self.delta.get((q, a), []), key=_set_key)

    def transitions(self):
        for (q, a) in sorted(self.delta):
            for t in self.sorted_bucket(q, a):
                yield q, a, t

    def num_transitions(self) -> int:
        return sum(len(b) for b in self.delta.values())

    def set_step(self, states: Iterable[tuple], a: str) -> list:
        """All subset-minimal unions picking one ``a``-target per state.

        An empty state set has the single (empty) successor; a state without
        ``a``-transitions kills the whole step.
        """
        results = [frozenset()]
        for q in sorted(set(states)):
            bucket = self.delta.get((q, a))
            if not bucket:
                return []
            results = minimal(r | t for r in results for t in bucket)
        return sorted(results, key=_set_key)

    def runs(self, q: tuple, word: Iterable[str]) -> list:
        """Target sets reachable from ``{q}`` by reading ``word``."""
        current = [frozenset([q])]
        for a in word:
            current = minimal(r for s in current for r in self.set_step(s, a))
            if not current:
                return []
        return sorted(current, key=_set_key)

    def accepting(self, word: tuple, memo: dict | None = None) -> frozenset:
        """States accepting ``word`` (a suffix of some stack word)."""
        if memo is not None and word in memo:
            return memo[word]
        if not word:
            result = self.finals
        else:
            rest = self.accepting(word[1:], memo)
            a = word[0]
            result = frozenset(
                q for q in self.states
                if any(t <= rest for t in self.delta.get((q, a), ()))
            )
        if memo is not None:
            memo[word] = result
        return result

    # -- comparison --------------------------------------------------------

    def same_buckets(self, other: "AMA", states: Iterable[tuple]) -> bool:
        for q in states:
            for a in self.alphabet:
                if set(self.bucket(q, a)) != set(other.bucket(q, a)):
                    return False
        return True

    def __eq__(self, other):
        if not isinstance(other, AMA):
            return NotImplemented
        norm = lambda d: {k: frozenset(v) for k, v in d.items() if v}
        return (self.states == other.states and self.alphabet == other.alphabet
                and self.finals == other.finals and norm(self.delta) == norm(other.delta))


def insert(bucket: list, targets: frozenset) -> bool:
    """Add ``targets`` to an antichain ``bucket`` in place; True if it changed."""
    for t in bucket:
        if t <= targets:
            return False
    bucket[:] = [t for t in bucket if not targets < t]
    bucket.append(targets)
    return True


def minimal(sets: Iterable[frozenset]) -> list:
    """Subset-minimal elements, duplicates removed."""
    out: list = []
    for s in sorted(set(sets), key=len):
        if not any(t <= s for t in out):
            out.append(s)
    return out


def leq_sets(small: Iterable[tuple], big: Iterable[tuple]) -> bool:
    return frozenset(small) <= frozenset(big)


def covers(weak: frozenset, strong: frozenset) -> bool:
    """``weak`` imposes no obligation that ``strong`` lacks, ignoring the
    universal state (it accepts every remainder, so it is never an obligation)."""
    return (weak - {STAR}) <= strong


def leq_ama(a1: AMA, a2: AMA, states: Iterable[tuple] | None = None) -> bool:
    """Transition-wise dominance: each ``a1`` transition is matched in ``a2``
    by one with a weaker target.  Implies language containment state-wise."""
    if a1.states != a2.states:
        raise AmaError("leq_ama needs automata over the same state set")
    keys = a1.delta if states is None else [
        (q, a) for q in states for a in a1.alphabet]
    for key in keys:
        for t in a1.delta.get(key, ()):
            if not any(covers(t2, t) for t2 in a2.delta.get(key, ())):
                return False
    return True


@dataclass
class Denotation:
    ama: AMA
    init: Mapping[str, tuple]
    stats: Stats = field(default_factory=Stats)

    def __post_init__(self):
        for p, q in self.init.items():
            if q not in self.ama._known:
                raise AmaError(f"init({p}) = {state_label(q)} is not a state")

    @property
    def controls(self) -> tuple:
        return tuple(sorted(self.init))

    @property
    def alphabet(self) -> tuple:
        return tuple(a for a in self.ama.alphabet if a != BOTTOM)

    def accepts(self, c: Configuration, memo: dict | None = None) -> bool:
        if c.control not in self.init:
            raise AmaError(f"configuration {c}: unknown control {c.control!r}")
        if not c.stack or c.stack[-1] != BOTTOM or BOTTOM in c.stack[:-1]:
            raise AmaError(f"configuration {c}: stack must end in exactly one {BOTTOM}")
        for a in c.stack:
            if a not in self.ama.alphabet:
                raise AmaError(f"configuration {c}: unknown letter {a!r}")
        return self.init[c.control] in self.ama.accepting(tuple(c.stack), memo)

    def sample_accepted(self, max_depth: int) -> list:
        memo: dict = {}
        out = []
        words = [()]
        for _ in range(max_depth + 1):
            for w in words:
                acc = self.ama.accepting(w + (BOTTOM,), memo)
                out.extend(Configuration(p, w + (BOTTOM,))
                           for p in self.controls if self.init[p] in acc)
            words = [w + (a,) for w in words for a in self.alphabet]
        return sorted(out)

    def __eq__(self, other):
        if not isinstance(other, Denotation):
            return NotImplemented
        return (self.ama == other.ama and dict(self.init) == dict(other.init)
                and asdict(self.stats) == asdict(other.stats))


def universal(controls: Iterable[str], alphabet: Iterable[str]) -> Denotation:
    letters = tuple(alphabet)
    if BOTTOM not in letters:
        letters += (BOTTOM,)
    ama = AMA((), letters)
    return Denotation(ama, {p: STAR for p in sorted(controls)})


# --- serialization -----------------------------------------------------------

def _enc(q: tuple) -> list:
    return list(q)


def _dec(x) -> tuple:
    if not isinstance(x, list) or not x:
        raise AmaError(f"malformed state {x!r}")
    return tuple(x)


def to_dict(d: Denotation) -> dict:
    ama = d.ama
    return {
        "states": [_enc(q) for q in ama.states],
        "alphabet": [a for a in ama.alphabet if a != BOTTOM],
        "bottom": BOTTOM,
        "delta": [{"src": _enc(q), "letter": a, "targets": [_enc(t) for t in sorted(ts)]}
                  for q, a, ts in ama.transitions()],
        "finals": [_enc(q) for q in sorted(ama.finals)],
        "init": {p: _enc(d.init[p]) for p in sorted(d.init)},
        "stats": asdict(d.stats),
    }


def to_json(d: Denotation) -> str:
    return json.dumps(to_dict(d), indent=1, sort_keys=True) + "\n"


def from_json(text: str) -> Denotation:
    try:
        doc = json.loads(text)
        if doc.get("bottom", BOTTOM) != BOTTOM:
            raise AmaError(f"unsupported bottom marker {doc['bottom']!r}")
        letters = tuple(doc["alphabet"]) + (BOTTOM,)
        states = [_dec(q) for q in doc["states"]]
        ama = AMA(states, letters, [_dec(q) for q in doc["finals"]], special=False)
        for tr in doc["delta"]:
            if tr["letter"] not in letters:
                raise AmaError(f"unknown letter {tr['letter']!r}")
            ama.add_transition(_dec(tr["src"]), tr["letter"], [_dec(t) for t in tr["targets"]])
        init = {p: _dec(q) for p, q in doc["init"].items()}
        return Denotation(ama, init, Stats(**doc.get("stats", {})))
    except (KeyError, TypeError, json.JSONDecodeError) as err:
        raise AmaError(f"malformed denotation document: {err}") from None


def reachable(d: Denotation) -> list:
    seen, todo = set(), sorted(set(d.init.values()))
    while todo:
        q = todo.pop()
        if q in seen:
            continue
        seen.add(q)
        for a in d.ama.alphabet:
            for t in d.ama.bucket(q, a):
                todo.extend(t - seen)
    return sorted(seen)


def to_dot(d: Denotation) -> str:
    """Graphviz rendering of the part reachable from the initial states.

    Each transition gets a small fan-out point from which one edge per
    target state leaves; an empty target is drawn as a dangling point.
    """
    states = reachable(d)
    ids = {q: f"s{i}" for i, q in enumerate(states)}
    out = ["digraph ama {", "  rankdir=LR;"]
    for q in states:
        shape = "doublecircle" if q in d.ama.finals else "circle"
        out.append(f'  {ids[q]} [shape={shape}, label="{state_label(q)}"];')
    for p in d.controls:
        out.append(f'  "init_{p}" [shape=plaintext, label="{p}"];')
        out.append(f'  "init_{p}" -> {ids[d.init[p]]};')
    n = 0
    for q in states:
        for a in d.ama.alphabet:
            for t in d.ama.sorted_bucket(q, a):
                if len(t) == 1:
                    (r,) = t
                    out.append(f'  {ids[q]} -> {ids[r]} [label="{a}"];')
                    continue
                hub = f"h{n}"
                n += 1
                out.append(f'  {hub} [shape=point];')
                out.append(f'  {ids[q]} -> {hub} [label="{a}", arrowhead=none];')
                for r in sorted(t):
                    out.append(f"  {hub} -> {ids[r]};")
    out.append("}")
    return "\n".join(out) + "\n"
