import itertools
import json
import random

import pytest

from pdmu.ama import (AMA, EPS, STAR, AmaError, Denotation, Stats, from_json, leq_ama,
                      leq_sets, to_dot, to_json, universal)
from pdmu.engine import model_check
from pdmu.gen import random_formula, random_system
from pdmu.mucalc import parse_formula
from pdmu.pds import BOTTOM, config

LETTERS = ("a", "b", BOTTOM)
X, Y = ("v", 0), ("v", 1)


def empty_ama(extra=(X, Y)):
    return AMA(extra, LETTERS)


def test_set_step_examples():
    A = empty_ama()
    for a in LETTERS:
        assert A.set_step({STAR}, a) == [frozenset([STAR])]
        assert A.set_step(set(), a) == [frozenset()]
        assert A.set_step({EPS}, a) == []


def test_set_step_unions_and_prunes():
    A = empty_ama()
    A.add_transition(X, "a", {STAR})
    A.add_transition(X, "a", {Y})
    A.add_transition(Y, "a", {Y})
    # {X,Y}: choices {STAR,Y} and {Y}; the second subsumes the first
    assert A.set_step({X, Y}, "a") == [frozenset([Y])]


def test_add_transition_subsumption():
    A = empty_ama()
    A.add_transition(X, "a", {STAR, Y})
    A.add_transition(X, "a", {STAR})
    assert A.bucket(X, "a") == [frozenset([STAR])]
    B = empty_ama()
    B.add_transition(X, "a", {STAR})
    assert not B.add_transition(X, "a", {STAR, Y})
    assert B.bucket(X, "a") == [frozenset([STAR])]
    C = empty_ama()
    C.add_transition(X, "a", {STAR})
    C.add_transition(X, "a", set())
    assert C.bucket(X, "a") == [frozenset()]


def test_add_transition_unknown_state():
    with pytest.raises(AmaError):
        empty_ama().add_transition(("v", 9), "a", {STAR})
    with pytest.raises(AmaError):
        empty_ama().add_transition(X, "a", {("v", 9)})


def test_accepts_examples(p1):
    u = universal(p1.controls, p1.alphabet)
    assert all(u.accepts(c) for c in p1.configurations(3))
    A = empty_ama()
    dead = Denotation(A, {"p": EPS, "q": EPS})
    assert not any(dead.accepts(c) for c in p1.configurations(3))
    A.add_transition(X, BOTTOM, {EPS})
    only_bottom = Denotation(A, {"p": X, "q": EPS})
    assert [c for c in p1.configurations(3) if only_bottom.accepts(c)] == [config("p")]


def test_accepts_rejects_malformed(p1):
    u = universal(p1.controls, p1.alphabet)
    with pytest.raises(AmaError):
        u.accepts(config("r", "a"))
    with pytest.raises(AmaError):
        u.accepts(config("p", "z"))


def test_leq_sets():
    assert leq_sets(set(), {STAR})
    assert not leq_sets({STAR}, set())
    assert leq_sets({X, Y}, {X, Y})


def random_ama(rng, states=(X, Y, ("v", 2))):
    A = AMA(states, LETTERS)
    pool = list(states) + [STAR, EPS]
    for _ in range(rng.randint(0, 12)):
        q = rng.choice(states)
        a = rng.choice(LETTERS)
        A.add_transition(q, a, rng.sample(pool, rng.randint(0, 2)))
    return A


def brute_accepts(A, q, word):
    """Run-tree search straight from the definition (no memo, no set_step)."""
    if not word:
        return q in A.finals
    return any(all(brute_accepts(A, r, word[1:]) for r in t) for t in A.bucket(q, word[0]))


def words(max_len):
    for n in range(max_len + 1):
        for w in itertools.product(("a", "b"), repeat=n):
            yield w + (BOTTOM,)


@pytest.mark.parametrize("seed", range(40))
def test_accepting_matches_run_tree_search(seed):
    A = random_ama(random.Random(seed))
    for w in words(3):
        acc = A.accepting(w)
        for q in A.states:
            assert (q in acc) == brute_accepts(A, q, w)


@pytest.mark.parametrize("seed", range(40))
def test_pruning_preserves_acceptance(seed):
    rng = random.Random(seed)
    states = (X, Y, ("v", 2))
    raw = []
    for _ in range(rng.randint(0, 14)):
        raw.append((rng.choice(states), rng.choice(LETTERS),
                    frozenset(rng.sample(list(states) + [STAR, EPS], rng.randint(0, 3)))))
    pruned = AMA(states, LETTERS)
    for q, a, t in raw:
        pruned.add_transition(q, a, t)
    unpruned = AMA(states, LETTERS)
    for q, a, t in raw:
        unpruned.delta.setdefault((q, a), [])
        if t not in unpruned.delta[(q, a)]:
            unpruned.delta[(q, a)].append(t)
    ws = list(words(4))
    for w in ws[:200]:
        assert pruned.accepting(w) == unpruned.accepting(w)


def test_leq_ama_examples():
    rng = random.Random(7)
    A = random_ama(rng)
    assert leq_ama(A, A)
    # no transitions at all: nothing to cover
    assert leq_ama(AMA(A.states, LETTERS), A)
    with pytest.raises(AmaError):
        leq_ama(A, AMA((X,), LETTERS))


@pytest.mark.parametrize("seed", range(60))
def test_leq_ama_preorder_and_containment(seed):
    rng = random.Random(seed)
    A, B, C = (random_ama(rng) for _ in range(3))
    # make dominated variants so the premise is exercised
    B2 = A.copy()
    for (q, a), bucket in list(B2.delta.items()):
        if q != STAR and rng.random() < 0.5:
            B2.add_transition(q, a, frozenset(rng.sample(list(bucket[0]), max(0, len(bucket[0]) - 1))))
    assert leq_ama(A, B2)
    for first, second in ((A, B), (A, B2), (B, C)):
        if leq_ama(first, second):
            for w in words(3):
                assert first.accepting(w) <= second.accepting(w)
    if leq_ama(A, B) and leq_ama(B, C):
        assert leq_ama(A, C)


def test_star_universality():
    A = empty_ama()
    for a in ("a", "b"):
        A.add_transition(X, a, {STAR})
    A.add_transition(X, BOTTOM, {EPS})
    assert all(X in A.accepting(w) for w in words(4))


def test_sample_accepted(p1):
    u = universal(p1.controls, p1.alphabet)
    assert len(u.sample_accepted(1)) == 6
    assert Denotation(empty_ama(), {"p": EPS, "q": EPS}).sample_accepted(3) == []
    d = model_check(p1, parse_formula(r"mu Z. y \/ ~<>Z"))
    listed = d.sample_accepted(3)
    assert listed == sorted(listed)
    assert set(listed) == {c for c in p1.configurations(3) if d.accepts(c)}


@pytest.mark.parametrize("seed", range(20))
def test_json_round_trip(seed):
    rng = random.Random(seed)
    sys = random_system(rng)
    d = model_check(sys, random_formula(rng, depth=3))
    assert from_json(to_json(d)) == d
    assert to_json(from_json(to_json(d))) == to_json(d)


def test_json_of_tt_is_valid(p1):
    doc = json.loads(to_json(model_check(p1, parse_formula("tt"))))
    assert doc["bottom"] == "$" and set(doc) >= {"states", "alphabet", "delta", "finals", "init", "stats"}


def test_from_json_rejects_garbage():
    for text in ("{", "{}", '{"alphabet": ["a"], "states": [], "finals": [], "delta": [{"src": 1}], "init": {}}'):
        with pytest.raises(AmaError):
            from_json(text)


def test_dot_universal_has_one_state_node(p1):
    dot = to_dot(universal(p1.controls, p1.alphabet))
    assert sum("shape=doublecircle" in line or "shape=circle" in line for line in dot.splitlines()) == 1


def test_dot_fans_out_target_sets(p1):
    d = model_check(p1, parse_formula(r"nu Z. x /\ ~[]Z"))
    assert "shape=point" in to_dot(d) or all(len(t) <= 1 for _, _, t in d.ama.transitions())
