import random

import pytest
from hypothesis import given, strategies as st

from posgsolve.answer import LOSE, WIN, ScopeError
from posgsolve.belief import (BeliefObligation, HAction1, IllegalAction, IllegalObservation,
                              belief_memoryless_insufficiency, build_h, initial_pair,
                              legal_actions, solve_pure, succ_h)
from posgsolve.fixtures import fig3
from posgsolve.game import build_game, normalize
from posgsolve.oracle import verify_witness

from conftest import rng_game


def m(g, *names):
    return sum(1 << g.state_id(x) for x in names)


def act(g, a, *u):
    return HAction1(g.actions1.index(a), m(g, *u))


def test_initial_pair(g1):
    assert initial_pair(g1) == BeliefObligation(m(g1, "q0"), m(g1, "q0"))
    g = build_game(["t"], "t", "a", "b", {("t", "a", "b"): {"t": 1}}, [["t"]], [["t"]], ["t"])
    assert initial_pair(g) == (0, 0)


def test_initial_pair_needs_perfect_p2(g3):
    with pytest.raises(ScopeError):
        initial_pair(g3)


def test_succ_h_fig1(g1):
    frm = BeliefObligation(m(g1, "q1", "q2"), m(g1, "q1", "q2"))
    live = g1.obs1_of[g1.state_id("q1")]
    full = succ_h(g1, frm, act(g1, "a", "q1", "q2", "smiley"), live)
    assert full == (m(g1, "q1", "q2"), m(g1, "q1", "q2"))
    narrow = succ_h(g1, frm, act(g1, "a", "q2", "smiley"), live)
    assert narrow == (m(g1, "q1", "q2"), m(g1, "q2"))
    smiley = g1.obs1_of[g1.state_id("smiley")]
    assert succ_h(g1, frm, act(g1, "a", "smiley", "q2"), smiley) == (0, 0)


def test_succ_h_rejects_bad_witness(g1):
    frm = BeliefObligation(m(g1, "q1", "q2"), m(g1, "q1", "q2"))
    live = g1.obs1_of[g1.state_id("q1")]
    with pytest.raises(IllegalAction):
        succ_h(g1, frm, act(g1, "a", "q1"), live)          # q1 fails to hit u from q2
    with pytest.raises(IllegalAction):
        succ_h(g1, frm, act(g1, "a", "q0", "q1", "q2"), live)  # outside post


def test_succ_h_rejects_impossible_block(g1):
    frm = BeliefObligation(m(g1, "q0"), m(g1, "q0"))
    smiley = g1.obs1_of[g1.state_id("smiley")]
    with pytest.raises(IllegalObservation):
        succ_h(g1, frm, act(g1, "a", "q1", "q2"), smiley)


def test_legal_actions_fig1(g1):
    frm = BeliefObligation(m(g1, "q0"), m(g1, "q0"))
    acts = legal_actions(g1, frm)
    # from q0, player 2 picks the successor; only u = {q1,q2} covers both
    assert set(acts) == {act(g1, "a", "q1", "q2"), act(g1, "b", "q1", "q2")}
    for x in acts:
        assert x.u & ~m(g1, "q1", "q2") == 0


@given(st.integers(0, 10**6))
def test_h_invariants(seed):
    g = normalize(rng_game(seed))
    h = build_h(g, "positive")
    assert h.h_states <= 3 ** g.n
    blocks = g.obs1_masks
    for key in h.arena.names:
        if key[0] == "h":
            s, o = key[1], key[2]
            assert o & ~s == 0
            assert s == 0 or sum(1 for b in blocks if s & b) == 1


def test_fig1_verdicts(g1):
    for mode in ("almost-sure", "positive"):
        ans = solve_pure(g1, mode)
        assert ans.verdict == WIN
        assert verify_witness(g1, ans.witness, mode).verified
        assert belief_memoryless_insufficiency(g1, mode)


def test_trivial_target_init():
    g = build_game(["t"], "t", "a", "b", {("t", "a", "b"): {"t": 1}}, [["t"]], [["t"]], ["t"])
    assert solve_pure(g, "almost-sure").verdict == WIN


def test_no_path_loses():
    g = build_game(["x", "t"], "x", "a", "b", {("x", "a", "b"): {"x": 1}, ("t", "a", "b"): {"t": 1}},
                   [["x"], ["t"]], [["x"], ["t"]], ["t"])
    assert solve_pure(g, "positive").verdict == LOSE


@given(st.integers(0, 10**6), st.sampled_from(["almost-sure", "positive"]))
def test_witnesses_verify(seed, mode):
    g = rng_game(seed)
    ans = solve_pure(g, mode)
    if ans.win:
        assert verify_witness(g, ans.witness, mode).verified


def test_almost_sure_implies_positive():
    for seed in range(60):
        g = rng_game(seed)
        if solve_pure(g, "almost-sure").win:
            assert solve_pure(g, "positive").win
