from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from posgsolve.fixtures import FIXTURES, G, L, build_fixture, fig10
from posgsolve.game import (bits, build_game, buchi_to_reach, dirac, make_dist, normalize,
                            p2_actions_revealed, post_any, post_set, reveal_p2_actions,
                            validate, with_init)
from posgsolve.oracle import brute_force_decide
from posgsolve.reductions import isomorphic, pure_to_rand

from conftest import rng_game


def ids(g, *names):
    return frozenset(g.state_id(n) for n in names)


def test_fixtures_validate():
    for name in FIXTURES:
        fx = build_fixture(name, 1 if name in ("Ln", "Cn", "Gn") else None)
        if hasattr(fx, "delta"):
            assert validate(fx) == [], name


def test_fixture_errors():
    with pytest.raises(ValueError):
        build_fixture("nope")
    with pytest.raises(ValueError):
        build_fixture("Ln")
    with pytest.raises(ValueError):
        build_fixture("Gn", 0)


def test_fig1_shape(g1):
    assert g1.n == 4
    assert g1.side.player1 == "partial" and g1.side.player2 == "perfect"
    assert g1.states[g1.init] == "q0"


def test_l1_states():
    assert set(L(1).states) == {"q_I", "L", "R", "q_1", "q_0"}


def test_bad_sum_reported(g1):
    d = list(map(list, g1.delta))
    d[0][0] = list(d[0][0])
    d[0][0][0] = make_dist([(1, Fraction(3, 4))])
    bad = replace(g1, delta=tuple(tuple(tuple(x) for x in row) for row in d))
    errs = validate(bad)
    assert len(errs) == 1 and errs[0].startswith("distribution sum")


def test_overlapping_blocks_reported(g1):
    bad = replace(g1, obs1=(frozenset({0, 1, 2}), frozenset({2, 3})))
    errs = validate(bad)
    assert len(errs) == 1 and errs[0].startswith("partition")


def test_post_examples(g1, g3):
    assert post_set(g1, ["q1"], "a", "b") == ids(g1, "smiley", "q1")
    assert post_set(g1, [], "a", "b") == frozenset()
    assert post_any(g1, ["q1", "q2"], "a") == ids(g1, "q1", "q2", "smiley")
    assert post_any(g1, ["q0"], "a") == ids(g1, "q1", "q2")
    assert post_any(g3, ["q2"], "a") == ids(g3, "q4")


@given(st.integers(0, 10_000), st.integers(0, 15))
def test_post_any_is_union(seed, smask):
    g = rng_game(seed)
    s = [q for q in range(g.n) if smask >> q & 1]
    for a in g.actions1:
        union = frozenset()
        for b in g.actions2:
            part = post_set(g, s, a, b)
            assert part <= post_any(g, s, a)
            union |= part
        assert union == post_any(g, s, a)


@given(st.integers(0, 10_000))
def test_normalize_idempotent_and_absorbing(seed):
    g = rng_game(seed)
    n1 = normalize(g)
    assert normalize(n1) == n1
    for t in n1.target:
        assert all(d == dirac(t) for row in n1.delta[t] for d in row)


def test_normalize_keeps_fig1(g1):
    assert normalize(g1) == g1


def test_normalize_rewrites_target_edges():
    g = build_game(["x", "t"], "x", "a", "b", {("x", "a", "b"): {"t": 1}, ("t", "a", "b"): {"x": 1}},
                   [["x"], ["t"]], [["x"], ["t"]], ["t"])
    assert normalize(g).delta[1][0][0] == dirac(1)


@given(st.integers(0, 10_000))
def test_buchi_to_reach_shape(seed):
    g = rng_game(seed)
    h = buchi_to_reach(g, [0])
    assert h.n == g.n + 1
    qt = h.n - 1
    assert h.target == {qt}
    assert all(d == dirac(qt) for row in h.delta[qt] for d in row)
    assert validate(h) == []


def _cycle(buchi_state):
    tr = {("x", "a", "a"): {"y": 1}, ("y", "a", "a"): {"x": 1}}
    return build_game(["x", "y"], "x", "a", "a", tr, [["x", "y"]], [["x"], ["y"]], [])


def test_buchi_to_reach_examples():
    g = _cycle("y")
    empty = buchi_to_reach(g, [])
    assert brute_force_decide(empty, "almost-sure").verdict == "lose"
    loop = build_game(["x"], "x", "a", "a", {("x", "a", "a"): {"x": 1}}, [["x"]], [["x"]], [])
    assert brute_force_decide(buchi_to_reach(loop, ["x"]), "almost-sure").verdict == "win"
    # the cycle visits y forever, so the reduced game is won almost surely
    assert brute_force_decide(buchi_to_reach(g, ["y"]), "almost-sure").verdict == "win"


def test_fig10_matches_reduction(g1):
    h, _ = pure_to_rand(g1)
    assert isomorphic(h, fig10()) is not None


def test_reveal_tags_only_ambiguous_steps(g3):
    assert not p2_actions_revealed(g3)
    r, keys = reveal_p2_actions(g3)
    assert p2_actions_revealed(r)
    assert len(keys) == r.n
    full, _ = reveal_p2_actions(g3, minimal=False)
    assert full.n >= r.n
    assert p2_actions_revealed(L(1)) and p2_actions_revealed(G(1))


def test_with_init(g1):
    assert with_init(g1, 2).init == 2


def test_bits():
    assert bits(0b1011) == [0, 1, 3]
