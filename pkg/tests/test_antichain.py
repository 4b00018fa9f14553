import random

from hypothesis import given, strategies as st

from posgsolve.antichain import (Antichain, all_pairs, alpha, antichain_of, closure, cpre,
                                 explicit_cpre, insert, preceq, solve_symbolic, union)
from posgsolve.belief import BeliefObligation as P, solve_pure
from posgsolve.game import normalize

from conftest import rng_game


def test_preceq_examples():
    assert preceq(P(0b01, 0b01), P(0b11, 0b11))
    assert preceq(P(0b01, 0), P(0b11, 0))
    assert not preceq(P(0b01, 0), P(0b11, 0b01))   # empty vs live class
    assert not preceq(P(0b11, 0b01), P(0b01, 0b01))
    assert not preceq(P(0b11, 0b10), P(0b11, 0b01))


pairs = st.builds(lambda s, o: P(s, o & s), st.integers(0, 15), st.integers(0, 15))


@given(st.lists(pairs, max_size=12))
def test_insert_matches_naive_closure(xs):
    ac = Antichain()
    for x in xs:
        ac = insert(ac, x)
        assert ac.check()
    universe = [P(s, o) for s in range(16) for o in range(16) if o & ~s == 0]
    naive = {y for y in universe if any(preceq(y, x) for x in xs)}
    assert {y for y in universe if y in ac} == naive


def _saturated(g, rng):
    ps = [p for p in all_pairs(g) if p != (0, 0)]
    return union(alpha(g), antichain_of(rng.sample(ps, min(len(ps), rng.randint(0, 3)))))


def _strip(xs):
    return {x for x in xs if x != (0, 0)}


@given(st.integers(0, 10**6))
def test_cpre_matches_explicit(seed):
    rng = random.Random(seed)
    g = normalize(rng_game(seed))
    ac = _saturated(g, rng)
    assert _strip(closure(g, cpre(g, ac))) == _strip(explicit_cpre(g, closure(g, ac)))


@given(st.integers(0, 10**6))
def test_cpre_downward_closed_and_monotone(seed):
    rng = random.Random(seed)
    g = normalize(rng_game(seed))
    small = _saturated(g, rng)
    big = union(small, _saturated(g, rng))
    c_small, c_big = closure(g, cpre(g, small)), closure(g, cpre(g, big))
    assert c_small <= c_big
    for x in c_small:
        assert all(y in c_small for y in all_pairs(g) if preceq(y, x))


@given(st.integers(0, 10**6), st.sampled_from(["almost-sure", "positive"]))
def test_symbolic_agrees_with_explicit(seed, mode):
    g = rng_game(seed)
    sym = solve_symbolic(g, mode)
    assert sym.verdict == solve_pure(g, mode).verdict
    assert sym.diagnostics["peak_antichain"] <= 3 ** g.n


def test_fixture_agreement(g1):
    for mode in ("almost-sure", "positive"):
        ans = solve_symbolic(g1, mode, witness=True)
        assert ans.win and ans.witness is not None
    assert solve_symbolic(g1, "positive").diagnostics["peak_antichain"] <= 3 ** g1.n
