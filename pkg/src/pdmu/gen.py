"""Seeded random pushdown systems and formulas for differential testing."""
from __future__ import annotations

import random

from .mucalc import (And, Atom, BackBox, BackDiamond, Box, Diamond, Formula,
                     Mu, NegAtom, Nu, Or, Var)
from .pds import BOTTOM, Command, PushdownSystem

LETTERS = "abc"


def random_system(rng: random.Random, max_controls: int = 4, max_letters: int = 3,
                  max_rules: int = 8, rewrite_only: bool = False,
                  props: tuple = ("x", "y")) -> PushdownSystem:
    controls = [f"p{i}" for i in range(rng.randint(1, max_controls))]
    alphabet = list(LETTERS[:rng.randint(1, max_letters)])
    commands = set()
    for _ in range(rng.randint(0, max_rules)):
        length = 1 if rewrite_only else rng.choice((0, 1, 1, 2))
        word = tuple(rng.choice(alphabet) for _ in range(length))
        commands.add(Command(rng.choice(controls), rng.choice(alphabet), rng.choice(controls), word))
    heads = [(p, a) for p in controls for a in alphabet + [BOTTOM]]
    valuation = {name: {h for h in heads if rng.random() < 0.35} for name in props}
    return PushdownSystem(tuple(controls), tuple(alphabet), tuple(commands), valuation)


_MODAL = (Box, Diamond, BackBox, BackDiamond)


def random_formula(rng: random.Random, depth: int = 5, atoms: tuple = ("x", "y"),
                   max_nesting: int = 2) -> Formula:
    """Closed formula of syntax-tree depth at most ``depth`` (a leaf has depth 0)
    whose fixpoints nest at most ``max_nesting`` deep."""
    counter = [0]

    def gen(d: int, scope: tuple, nest: int) -> Formula:
        leaf = d == 0 or rng.random() < 0.15
        if leaf:
            if scope and rng.random() < 0.6:
                return Var(rng.choice(scope))
            return (Atom if rng.random() < 0.6 else NegAtom)(rng.choice(atoms))
        choices = ["and", "or", "modal", "modal"]
        if nest < max_nesting:
            choices += ["fix", "fix"]
        kind = rng.choice(choices)
        if kind == "modal":
            return rng.choice(_MODAL)(gen(d - 1, scope, nest))
        if kind == "fix":
            var = f"Z{counter[0]}"
            counter[0] += 1
            return rng.choice((Mu, Nu))(var, gen(d - 1, scope + (var,), nest + 1))
        return (And if kind == "and" else Or)(gen(d - 1, scope, nest), gen(d - 1, scope, nest))

    return gen(depth, (), 0)
