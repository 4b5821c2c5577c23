import random

import pytest
from hypothesis import given, settings, strategies as st

from pdmu.gen import random_formula
from pdmu.mucalc import (And, Atom, BackBox, BackDiamond, Box, Diamond, FormulaError, Mu,
                         NegAtom, Nu, Or, Var, analyze, negate, parse_formula, to_text, walk)


def test_parse_examples():
    assert parse_formula(r"mu Z. x \/ ~<>Z") == Mu("Z", Or(Atom("x"), BackDiamond(Var("Z"))))
    assert parse_formula(r"nu Z. x /\ ~[]Z") == Nu("Z", And(Atom("x"), BackBox(Var("Z"))))


def test_precedence():
    f = parse_formula(r"x \/ y /\ <>!x")
    assert f == Or(Atom("x"), And(Atom("y"), Diamond(NegAtom("x"))))
    assert parse_formula(r"[](x \/ y)") == Box(Or(Atom("x"), Atom("y")))
    # binders extend as far right as possible
    assert parse_formula(r"x /\ mu Z. y \/ Z") == And(Atom("x"), Mu("Z", Or(Atom("y"), Var("Z"))))


@pytest.mark.parametrize("text", [r"!(x \/ y)", "!Z", "!<>x", "!tt"])
def test_negation_only_on_atoms(text):
    with pytest.raises(FormulaError, match="negation only on atoms"):
        parse_formula(text)


@pytest.mark.parametrize("text", ["", "x /\\", "(x", "mu z. x", "x y", "x & y"])
def test_syntax_errors(text):
    with pytest.raises(FormulaError):
        parse_formula(text)


def test_closed_flag():
    assert parse_formula("<>Z") == Diamond(Var("Z"))
    with pytest.raises(FormulaError, match="unbound"):
        parse_formula("<>Z", closed=True)


def test_constants():
    assert parse_formula("tt") == Nu("Z", Var("Z"))
    assert parse_formula("ff") == Mu("Z", Var("Z"))


def test_alpha_normalization_makes_binders_distinct():
    f = parse_formula(r"(mu Z. x \/ <>Z) /\ (nu Z. y /\ []Z) /\ tt")
    binders = [g.var for g in walk(f) if isinstance(g, (Mu, Nu))]
    assert len(binders) == len(set(binders)) == 3


def test_alpha_normalization_respects_shadowing():
    f = parse_formula(r"mu Z. <>Z \/ nu Z. []Z")
    inner = f.body.right
    assert inner.var != "Z" and inner.body == Box(Var(inner.var))
    assert f.body.left == Diamond(Var("Z"))


def test_analyze_examples():
    info = analyze(parse_formula(r"mu Z. x \/ ~<>Z"))
    assert info.depth == 1 and info.free == frozenset()
    # mu Z.(x \/ ~<>Z), x \/ ~<>Z, x, ~<>Z, Z
    assert len(info.subformulas) == 5
    assert analyze(parse_formula(r"x /\ y")).depth == 0
    assert analyze(parse_formula(r"nu Y. (mu Z. x \/ <>Z) /\ []Y")).depth == 2


def _depth_reference(f):
    if isinstance(f, (Mu, Nu)):
        return 1 + _depth_reference(f.body)
    return max([_depth_reference(c) for c in f.children()] + [0])


@pytest.mark.parametrize("seed", range(200))
def test_depth_matches_reference(seed):
    f = random_formula(random.Random(seed))
    info = analyze(f)
    assert info.depth == _depth_reference(f)
    assert len(set(info.subformulas)) == len(info.subformulas)
    assert set(info.subformulas) == set(walk(f))


def test_negate_examples():
    assert negate(parse_formula(r"mu Z. x \/ <>Z")) == parse_formula(r"nu Z. !x /\ []Z")
    assert negate(NegAtom("x")) == Atom("x")
    with pytest.raises(FormulaError):
        negate(Diamond(Var("Z")))


def _count(f, kind):
    return sum(isinstance(g, kind) for g in walk(f))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 100_000))
def test_negate_involution_and_binder_swap(seed):
    f = random_formula(random.Random(seed))
    g = negate(f)
    assert negate(g) == f
    assert _count(g, Mu) == _count(f, Nu) and _count(g, Nu) == _count(f, Mu)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 100_000))
def test_print_parse_round_trip(seed):
    f = random_formula(random.Random(seed))
    assert parse_formula(to_text(f)) == f
