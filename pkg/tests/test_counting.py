import random
from dataclasses import replace

import pytest
from hypothesis import given, settings, strategies as st

from posgsolve.answer import LOSE, WIN, ScopeError
from posgsolve.counting import (OMEGA, KLadder, abs_counting, bad_states, bad_states_enumerated,
                                cap_schedule, compose_restart_play, compute_z, revealed,
                                safe_actions, solve_almost_sure_p1perfect, solve_pos_reach_safe,
                                succ_counting)
from posgsolve.fixtures import G, L, fig1, fig3, fig9
from posgsolve.game import normalize
from posgsolve.oracle import verify_witness
from posgsolve.transducer import constant

from conftest import abs_monotone_violations, rng_game, succ_oracle_mismatches

P1_PERFECT = dict(p1_obs="perfect", p2_obs="partial", max_states=3)


def test_ladder_values():
    lad = KLadder(3, 2, 64)
    assert lad.values == (64, 64, 64)
    assert all(lad.truncated)
    big = KLadder(1, 2, 1 << 20)
    assert big.K(1) == 4 and not big.is_truncated(1)
    with pytest.raises(ValueError):
        KLadder(2, 3, 5)


def test_cap_schedule():
    assert cap_schedule(2, 64) == [4, 8, 16, 32, 64]
    assert cap_schedule(2, 4) == [4]
    with pytest.raises(ValueError):
        cap_schedule(3, 4)


def test_scope():
    with pytest.raises(ScopeError):
        safe_actions(fig1())


def test_fig9_safe_everywhere(g9):
    safe = safe_actions(g9)
    assert all(len(s) == len(g9.actions1) for s in safe)
    assert compute_z(g9) == frozenset(range(g9.n))


def test_unreachable_target_outside_z():
    g = normalize(L(1))
    z = compute_z(g)
    assert g.state_id("q_0") in z
    # q_0 is absorbing, every other state can drift there
    assert len(z) == g.n


@given(st.integers(0, 10**6), st.integers(0, 7))
def test_z_between_target_and_good(seed, qmask):
    g = normalize(rng_game(seed, **P1_PERFECT))
    qg = frozenset(q for q in range(g.n) if qmask >> q & 1) | g.target
    z = compute_z(g, [g.states[q] for q in g.target], [g.states[q] for q in qg])
    assert g.target <= z <= qg


def test_succ_l1_one_copy_survives():
    g = normalize(L(1))
    q1, q0 = g.state_id("q_1"), g.state_id("q_0")
    f = [0] * g.n
    f[q1] = 2
    act = [None] * g.n
    act[q1] = (0, 1)
    for b in range(2):
        out = succ_counting(g, tuple(f), tuple(act), b, 0)
        assert out[q0] == 1 and out[q1] == 1


@pytest.mark.parametrize("k", [1, 2])
def test_halving(k):
    g = normalize(L(1))
    q1, q0 = g.state_id("q_1"), g.state_id("q_0")
    f = [0] * g.n
    f[q1] = 2 ** k
    act = [None] * g.n
    act[q1] = tuple(sorted([0, 1] * 2 ** (k - 1)))
    for b in range(2):
        out = succ_counting(g, tuple(f), tuple(act), b, 0)
        assert out[q0] == 2 ** (k - 1)


def test_succ_matches_multiset_oracle():
    games = [rng_game(s, **P1_PERFECT) for s in range(150)]
    mismatches, checked = succ_oracle_mismatches(games, random.Random(5))
    assert mismatches == 0 and checked > 100


def test_abs_monotone_exhaustive():
    assert abs_monotone_violations(3, 4) == 0


def test_abs_promotes_least_state_first():
    lad = KLadder(3, 2, 4)
    assert abs_counting((5, 5, 0), lad)[0] == OMEGA


@pytest.mark.parametrize("make, n", [(L, 1), (L, 2)])
def test_ln_positive_win(make, n):
    g = make(n)
    ans = solve_pos_reach_safe(g, k_cap=16)
    assert ans.verdict == WIN
    assert ans.diagnostics["verification"] == "verified"


def test_fixtures_positive():
    for g in (fig3(), fig9(), G(1)):
        ans = solve_pos_reach_safe(g, k_cap=16)
        assert ans.verdict == WIN, ans.diagnostics.get("reason")
        wg = ans.diagnostics["witness_game"]
        assert verify_witness(replace(wg, safe=None), ans.witness, "positive").verified


def test_unreachable_target_loses():
    g = normalize(L(1))
    q0 = g.state_id("q_0")
    ans = solve_pos_reach_safe(g, qg=[s for s in g.states if s != "q_1"])
    # without q_1 the target cannot be entered
    assert ans.verdict == LOSE
    assert "reason" in ans.diagnostics and q0 in g.target


@settings(max_examples=12)
@given(st.integers(0, 10**6))
def test_positive_witnesses_verify(seed):
    g = rng_game(seed, **P1_PERFECT)
    ans = solve_pos_reach_safe(g, k_cap=4)
    if ans.verdict == WIN:
        wg = ans.diagnostics["witness_game"]
        assert verify_witness(replace(wg, safe=None), ans.witness, "positive").verified


def test_bad_states_match_enumeration():
    seen = 0
    for s in range(40):
        g = rng_game(s, **P1_PERFECT)
        r, _ = revealed(g)
        if r.n > 5:
            continue
        certain, possible, _ = bad_states(g, k_cap=8, verify=False)
        if certain != possible:
            continue
        assert bad_states_enumerated(g, ladder=KLadder(r.n, len(r.actions1), 8)) == certain
        seen += 1
    assert seen >= 10


def test_bad_states_antimonotone():
    for s in range(20):
        g = normalize(rng_game(s, **P1_PERFECT))
        small = [g.states[q] for q in g.target]
        extra = [x for x in g.states if x not in small][-1:]
        c1, p1, _ = bad_states(g, small, k_cap=8, verify=False)
        c2, p2, _ = bad_states(g, small + extra, k_cap=8, verify=False)
        if c1 == p1 and c2 == p2 and revealed(g)[1] is None:
            assert c2 <= c1


def test_no_path_states_bad():
    g = normalize(L(1))
    certain, _, _ = bad_states(g, ["q_0"], k_cap=8)
    # player 2 keeps a positive share of copies away from q_0 forever
    assert certain == frozenset(range(g.n)) - {g.state_id("q_0")}
    certain, _, _ = bad_states(g, ["q_I"], k_cap=8)
    assert g.state_id("q_0") in certain


def test_restart_play_single_state():
    sigma = constant(("a", "b"), 2, 1)
    rp = compose_restart_play({0: sigma}, 3, [0, 0])
    assert rp.size == 1 + sigma.size * 2
    m = rp.m0
    for _ in range(7):
        assert rp.next[m][0] == sigma.next[0][0]
        m = rp.update[m][0]
    with pytest.raises(ValueError):
        compose_restart_play({0: sigma}, 0)


@pytest.mark.parametrize("make", [fig3, fig9])
def test_almost_sure_fixtures(make):
    ans = solve_almost_sure_p1perfect(make(), k_cap=16)
    assert ans.verdict == WIN
    assert ans.diagnostics["verification"] == "verified"


def test_almost_sure_l1_loses():
    assert solve_almost_sure_p1perfect(L(1), k_cap=16).verdict == LOSE
