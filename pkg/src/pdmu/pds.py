"""Pushdown systems in normal form (pop / rewrite / push commands).

A configuration is a control state plus a stack word read top-to-bottom and
terminated by the bottom marker ``$``.  The bottom marker is read-only: no
command may pop it, rewrite it, or place it on the stack, so every command
has a source letter drawn from the ordinary alphabet.
"""
from __future__ import annotations

import re
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

BOTTOM = "$"
WILDCARD = "*"

Head = tuple  # (control, letter)


class PdsError(ValueError):
    """Invalid pushdown system, optionally tied to a source line."""

    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.message = message
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where = f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class Command(NamedTuple):
    control: str
    letter: str
    target: str
    word: tuple  # replacement for the top letter, length 0, 1 or 2

    @property
    def kind(self) -> str:
        return ("pop", "rewrite", "push")[len(self.word)]

    def __str__(self) -> str:
        rhs = " ".join((self.target,) + self.word)
        return f"{self.control} {self.letter} -> {rhs}"


class Configuration(NamedTuple):
    control: str
    stack: tuple  # top first, BOTTOM last

    @property
    def head(self) -> tuple:
        return (self.control, self.stack[0])

    def __str__(self) -> str:
        return " ".join((self.control,) + self.stack)


def config(control: str, *letters: str) -> Configuration:
    """Build a configuration; the bottom marker is appended if missing."""
    stack = tuple(letters)
    if not stack or stack[-1] != BOTTOM:
        stack += (BOTTOM,)
    return Configuration(control, stack)


def parse_config(text: str) -> Configuration:
    tokens = text.split()
    if len(tokens) < 2:
        raise PdsError(f"malformed configuration {text!r}: need a control and a stack ending in {BOTTOM}")
    if tokens[-1] != BOTTOM or BOTTOM in tokens[1:-1]:
        raise PdsError(f"malformed configuration {text!r}: {BOTTOM} must occur exactly once, last")
    return Configuration(tokens[0], tuple(tokens[1:]))


@dataclass(frozen=True)
class PushdownSystem:
    controls: tuple
    alphabet: tuple
    commands: tuple
    props: Mapping[str, frozenset] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "controls", tuple(sorted(set(self.controls))))
        object.__setattr__(self, "alphabet", tuple(sorted(set(self.alphabet))))
        object.__setattr__(self, "commands", tuple(sorted(set(self.commands))))
        object.__setattr__(
            self, "props", {k: frozenset(v) for k, v in sorted(self.props.items())}
        )
        self._validate()

    def _validate(self) -> None:
        if not self.controls:
            raise PdsError("no controls declared")
        if not self.alphabet:
            raise PdsError("no alphabet declared")
        if BOTTOM in self.alphabet:
            raise PdsError(f"bottom marker {BOTTOM} cannot be part of the alphabet")
        controls, letters = set(self.controls), set(self.alphabet)
        for cmd in self.commands:
            check_command(cmd, controls, letters)
        for name, heads in self.props.items():
            for p, a in heads:
                if p not in controls:
                    raise PdsError(f"prop {name}: undeclared control {p!r}")
                if a != BOTTOM and a not in letters:
                    raise PdsError(f"prop {name}: undeclared letter {a!r}")

    @property
    def letters(self) -> tuple:
        """Full reading alphabet: the stack letters followed by the bottom marker."""
        return self.alphabet + (BOTTOM,)

    @property
    def heads(self) -> tuple:
        return tuple((p, a) for p in self.controls for a in self.letters)

    def prop(self, name: str) -> frozenset:
        try:
            return self.props[name]
        except KeyError:
            raise PdsError(f"unknown proposition {name!r}") from None

    def commands_from(self, control: str, letter: str) -> list:
        return self._by_head().get((control, letter), [])

    def _by_head(self) -> dict:
        cache = self.__dict__.get("_head_cache")
        if cache is None:
            cache = defaultdict(list)
            for cmd in self.commands:
                cache[(cmd.control, cmd.letter)].append(cmd)
            cache = dict(cache)
            object.__setattr__(self, "_head_cache", cache)
        return cache

    def is_rewrite_only(self) -> bool:
        return all(len(cmd.word) == 1 for cmd in self.commands)

    def configurations(self, max_depth: int) -> list:
        """All configurations whose stack has at most ``max_depth`` letters above the bottom, sorted."""
        out = []
        words = [()]
        for _ in range(max_depth + 1):
            for p in self.controls:
                out.extend(Configuration(p, w + (BOTTOM,)) for w in words)
            words = [w + (a,) for w in words for a in self.alphabet]
        return sorted(out)

    def to_text(self) -> str:
        lines = ["controls " + " ".join(self.controls), "alphabet " + " ".join(self.alphabet)]
        lines += [f"rule {cmd}" for cmd in self.commands]
        for name, heads in self.props.items():
            lines.append(f"prop {name}: " + ", ".join(f"{p} {a}" for p, a in sorted(heads)))
        return "\n".join(lines) + "\n"


def check_command(cmd: Command, controls: set, letters: set) -> None:
    if cmd.control not in controls or cmd.target not in controls:
        bad = cmd.control if cmd.control not in controls else cmd.target
        raise PdsError(f"rule {cmd}: undeclared control {bad!r}")
    if cmd.letter == BOTTOM:
        if not cmd.word:
            raise PdsError(f"rule {cmd}: bottom cannot be popped")
        raise PdsError(f"rule {cmd}: bottom cannot be rewritten")
    if BOTTOM in cmd.word:
        raise PdsError(f"rule {cmd}: bottom cannot be pushed")
    if len(cmd.word) > 2:
        raise PdsError(f"rule {cmd}: not in normal form (word longer than 2)")
    for a in (cmd.letter,) + cmd.word:
        if a not in letters:
            raise PdsError(f"rule {cmd}: undeclared letter {a!r}")


def normalize(rules: Iterable[tuple], controls: Iterable[str] = ()) -> tuple:
    """Turn generalized rules ``(p, a, p', word)`` into normal-form commands.

    A word ``b1 ... bn`` with ``n > 2`` is built bottom-up: the first command
    pushes ``b(n-1) bn``, each following one replaces the current top by two
    letters, through ``n - 2`` fresh controls named after the rule.  Returns
    ``(commands, fresh_controls)``.
    """
    taken = set(controls)
    commands, fresh = [], []
    for index, (p, a, q, word) in enumerate(rules):
        word = tuple(word)
        if BOTTOM in word:
            raise PdsError(f"rule {p} {a} -> {q} {' '.join(word)}: bottom cannot be pushed")
        if len(word) <= 2:
            commands.append(Command(p, a, q, word))
            continue
        n = len(word)
        names = []
        for k in range(1, n - 1):
            name = f"{p}.{a}.r{index}.{k}"
            while name in taken:
                name += "'"
            taken.add(name)
            names.append(name)
        fresh.extend(names)
        # names[0] holds b(n-1) bn, names[k] holds b(n-1-k) ... bn
        commands.append(Command(p, a, names[0], word[n - 2:]))
        for k in range(1, n - 2):
            commands.append(Command(names[k - 1], word[n - 2 - k + 1], names[k], word[n - 2 - k:n - k]))
        commands.append(Command(names[-1], word[1], q, word[:2]))
    return tuple(commands), tuple(fresh)


# --- text format -----------------------------------------------------------

_IDENT = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_.'-]*$")


def parse_pds(text: str, source: str | None = None) -> PushdownSystem:
    controls: list = []
    alphabet: list = []
    rules: list = []
    rule_lines: list = []
    raw_props: dict = {}

    def fail(msg, lineno):
        raise PdsError(msg, lineno, source)

    def ident(tok, lineno, what):
        if tok != BOTTOM and not _IDENT.match(tok):
            fail(f"bad {what} {tok!r}", lineno)
        return tok

    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        keyword, _, rest = line.partition(" ")
        rest = rest.strip()
        if keyword == "controls":
            controls += [ident(t, lineno, "control") for t in rest.split()]
        elif keyword == "alphabet":
            for t in rest.split():
                if t == BOTTOM:
                    fail(f"{BOTTOM} is the bottom marker and cannot be declared", lineno)
                alphabet.append(ident(t, lineno, "letter"))
        elif keyword == "rule":
            lhs, arrow, rhs = rest.partition("->")
            lhs, rhs = lhs.split(), rhs.split()
            if not arrow or len(lhs) != 2 or len(rhs) < 1:
                fail("expected 'rule <control> <letter> -> <control> [letters...]'", lineno)
            rules.append((lhs[0], lhs[1], rhs[0], tuple(rhs[1:])))
            rule_lines.append(lineno)
        elif keyword == "prop":
            name, colon, body = rest.partition(":")
            name = name.strip()
            if not colon or not re.match(r"^[a-z][A-Za-z0-9_]*$", name):
                fail("expected 'prop <lowercase name>: <control> <letter>, ...'", lineno)
            if name in ("tt", "ff", "mu", "nu"):
                fail(f"prop name {name!r} is reserved", lineno)
            if name in raw_props:
                fail(f"duplicate proposition {name!r}", lineno)
            heads = []
            for item in body.split(","):
                toks = item.split()
                if not toks:
                    continue
                if len(toks) != 2:
                    fail(f"prop {name}: expected '<control> <letter>' pairs, got {item.strip()!r}", lineno)
                heads.append((toks[0], toks[1], lineno))
            raw_props[name] = heads
        else:
            fail(f"unknown directive {keyword!r}", lineno)

    if not controls:
        raise PdsError("no controls declared", None, source)
    if not alphabet:
        raise PdsError("no alphabet declared", None, source)
    declared_c, declared_a = set(controls), set(alphabet)

    for (p, a, q, word), lineno in zip(rules, rule_lines):
        try:
            if a == BOTTOM and not word:
                raise PdsError(f"rule {p} {a} -> {q}: bottom cannot be popped")
            if len(word) > 2:
                normalize([(p, a, q, word)])  # only to surface bottom errors early
            else:
                check_command(Command(p, a, q, word), declared_c, declared_a)
            for x in (p, q):
                if x not in declared_c:
                    raise PdsError(f"undeclared control {x!r}")
            for x in (a,) + word:
                if x not in declared_a and x != BOTTOM:
                    raise PdsError(f"undeclared letter {x!r}")
        except PdsError as err:
            fail(err.message, lineno)
    commands, fresh = normalize(rules, controls)

    letters = tuple(sorted(declared_a)) + (BOTTOM,)
    props = {}
    for name, heads in raw_props.items():
        expanded = set()
        for p, a, lineno in heads:
            if p != WILDCARD and p not in declared_c:
                fail(f"prop {name}: undeclared control {p!r}", lineno)
            if a != WILDCARD and a not in letters:
                fail(f"prop {name}: undeclared letter {a!r}", lineno)
            ps = sorted(declared_c) if p == WILDCARD else [p]
            as_ = letters if a == WILDCARD else [a]
            expanded.update((x, y) for x in ps for y in as_)
        props[name] = expanded
    try:
        return PushdownSystem(tuple(controls) + fresh, tuple(alphabet), commands, props)
    except PdsError as err:
        raise PdsError(err.message, None, source) from None


# --- semantics -------------------------------------------------------------

@dataclass(frozen=True)
class PreIndex:
    """Predecessor tables keyed by the configuration head a command produces."""

    prepop: Mapping[str, frozenset]
    prerew: Mapping[tuple, frozenset]
    prepush: Mapping[tuple, frozenset]

    def pop(self, p: str) -> frozenset:
        return self.prepop.get(p, frozenset())

    def rew(self, p: str, a: str) -> frozenset:
        return self.prerew.get((p, a), frozenset())

    def push(self, p: str, a: str, b: str) -> frozenset:
        return self.prepush.get((p, a, b), frozenset())

    def pre(self, p: str, a: str, b: str) -> frozenset:
        return self.pop(p) | self.rew(p, a) | self.push(p, a, b)


def pre_index(sys: PushdownSystem) -> PreIndex:
    pop, rew, push = defaultdict(set), defaultdict(set), defaultdict(set)
    for cmd in sys.commands:
        src = (cmd.control, cmd.letter)
        if len(cmd.word) == 0:
            pop[cmd.target].add(src)
        elif len(cmd.word) == 1:
            rew[(cmd.target, cmd.word[0])].add(src)
        else:
            push[(cmd.target,) + cmd.word].add(src)
    freeze = lambda d: {k: frozenset(v) for k, v in sorted(d.items())}
    return PreIndex(freeze(pop), freeze(rew), freeze(push))


def check_config(sys: PushdownSystem, c: Configuration) -> None:
    if c.control not in sys.controls:
        raise PdsError(f"configuration {c}: unknown control {c.control!r}")
    if not c.stack or c.stack[-1] != BOTTOM or BOTTOM in c.stack[:-1]:
        raise PdsError(f"configuration {c}: stack must end in exactly one {BOTTOM}")
    for a in c.stack[:-1]:
        if a not in sys.alphabet:
            raise PdsError(f"configuration {c}: unknown letter {a!r}")


def step(sys: PushdownSystem, c: Configuration) -> set:
    top, rest = c.stack[0], c.stack[1:]
    return {
        Configuration(cmd.target, cmd.word + rest)
        for cmd in sys.commands_from(c.control, top)
    }


def pred(sys: PushdownSystem, c: Configuration, index: PreIndex | None = None) -> set:
    index = index or pre_index(sys)
    p, stack = c.control, c.stack
    out = {Configuration(p1, (a1,) + stack) for p1, a1 in index.pop(p)}
    out |= {Configuration(p1, (a1,) + stack[1:]) for p1, a1 in index.rew(p, stack[0])}
    if len(stack) >= 2:
        out |= {Configuration(p1, (a1,) + stack[2:]) for p1, a1 in index.push(p, stack[0], stack[1])}
    return out
