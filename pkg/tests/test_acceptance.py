"""End-to-end acceptance checks, one per criterion; each prints a PASS/FAIL line."""
import random
import time
from fractions import Fraction
from itertools import product as cartesian

import pytest

from posgsolve import randgen
from posgsolve.antichain import solve_symbolic
from posgsolve.belief import belief_memoryless_insufficiency, build_h, solve_pure
from posgsolve.counting import (OMEGA, solve_almost_sure_p1perfect, solve_pos_reach_safe,
                                succ_counting)
from posgsolve.fixtures import G, L, fig1, fig3, fig9, fig10
from posgsolve.game import normalize
from posgsolve.oracle import (brute_force_decide, enumerate_transducers, exact_prob,
                              minimal_memory, product, verify_witness)
from posgsolve.reductions import isomorphic, pure_to_rand
from posgsolve.transducer import constant, memoryless

from conftest import (abs_monotone_violations, random_arena, reduction_disagreements,
                      succ_oracle_mismatches)
from test_arena import determinacy_violations

MODES = ("almost-sure", "positive")


@pytest.fixture
def report(capsys):
    def emit(n: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\ncriterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return emit


@pytest.fixture(scope="module")
def corpus():
    return randgen.corpus(7, 500)


def test_c01_fig1_verdicts(report):
    t0 = time.perf_counter()
    g = fig1()
    wins = {m: solve_pure(g, m).win for m in MODES}
    insufficient = {m: belief_memoryless_insufficiency(g, m) for m in MODES}
    dt = time.perf_counter() - t0
    ok = all(wins.values()) and all(insufficient.values()) and dt < 1
    report(1, ok, f"wins={wins} belief-memoryless insufficient={insufficient} ({dt:.2f}s)")


def test_c02_fig1_minimal_memory(report):
    t0 = time.perf_counter()
    g = fig1()
    k, ans = minimal_memory(g, "almost-sure", 2)
    one_mem = list(enumerate_transducers(g.actions1, len(g.obs1), 1))
    refuted = sum(not verify_witness(g, s, "almost-sure").verified for s in one_mem)
    dt = time.perf_counter() - t0
    ok = (k == 2 and verify_witness(g, ans.witness, "almost-sure").verified
          and refuted == len(one_mem) and dt < 10)
    report(2, ok, f"minimal memory {k}; {refuted}/{len(one_mem)} one-memory strategies "
                  f"refuted ({dt:.2f}s)")


def test_c03_backend_equivalence(report, corpus):
    bad = sum(solve_pure(g, m, extract=False).verdict != solve_symbolic(g, m).verdict
              for g in corpus for m in MODES)
    report(3, bad == 0, f"{bad} disagreements over {len(corpus)} games x 2 modes")


def test_c04_oracle_agreement(report, corpus):
    bad = unknown = 0
    for g in corpus:
        for m in MODES:
            bf = brute_force_decide(g, m, p1_mem=3 ** g.n)
            unknown += bf.verdict == "unknown-within-bound"
            bad += bf.verdict != solve_pure(g, m, extract=False).verdict
    report(4, bad == 0, f"{bad} disagreements ({unknown} inconclusive) over "
                        f"{len(corpus)} games x 2 modes")


def test_c05_h_size_bound(report, corpus):
    worst = max(build_h(g, m).h_states / 3 ** normalize(g).n for g in corpus for m in MODES)
    report(5, worst <= 1, f"largest |H| / 3^|Q| = {worst:.3f}")


def test_c06_fig9(report):
    t0 = time.perf_counter()
    g = fig9()
    p = exact_prob(product(g, constant(g.actions1, len(g.obs1), 0),
                           constant(g.actions2, len(g.obs2), 0)))
    t_prob = time.perf_counter() - t0
    ans = solve_almost_sure_p1perfect(g, k_cap=16)
    ok = (p == Fraction(1, 2) and t_prob < 1 and ans.win
          and ans.diagnostics.get("verification") == "verified")
    report(6, ok, f"always-a vs always-a hits with probability {p} ({t_prob:.3f}s); "
                  f"Restart/Play witness {ans.diagnostics.get('verification')} "
                  f"with memory {ans.diagnostics.get('witness_memory')}")


def test_c07_fig3(report):
    t0 = time.perf_counter()
    g = fig3()
    ans = solve_almost_sure_p1perfect(g, k_cap=16)
    choices = list(cartesian(range(len(g.actions1)), repeat=len(g.obs1)))
    refuted = sum(not verify_witness(g, memoryless(g.actions1, list(c)), "almost-sure").verified
                  for c in choices)
    dt = time.perf_counter() - t0
    ok = ans.win and refuted == len(choices) and dt < 10
    report(7, ok, f"verdict {ans.verdict}; {refuted}/{len(choices)} memoryless strategies "
                  f"refuted ({dt:.2f}s)")


def test_c08_ln_memory_growth(report):
    mem = {}
    for n in (1, 2):
        k, _ = minimal_memory(L(n), "positive", 3)
        mem[n] = k
    wins = {n: solve_pos_reach_safe(L(n), k_cap=16).win for n in (1, 2)}
    ok = None not in mem.values() and mem[1] < mem[2] and all(wins.values())
    report(8, ok, f"minimal positive memory L1={mem[1]} L2={mem[2]}; counting wins={wins}")


def test_c09_reductions(report):
    iso = isomorphic(pure_to_rand(fig1())[0], fig10()) is not None
    games = randgen.corpus(9, 200, randgen.GenConfig(min_states=3, max_states=3))
    bad = [d for g in games for d in reduction_disagreements(g, "almost-sure")]
    report(9, iso and not bad, f"fig10 isomorphic={iso}; {len(bad)} disagreements over "
                               f"{len(games)} games")


def test_c10_counting_operators(report):
    cfg = randgen.GenConfig(max_states=3, p1_obs="perfect", p2_obs="partial")
    mism, checked = succ_oracle_mismatches(randgen.corpus(10, 300, cfg), random.Random(10))
    abs_bad = abs_monotone_violations(3, 4)
    g = normalize(L(1))
    q1, q0 = g.state_id("q_1"), g.state_id("q_0")
    halves = {}
    for k in (1, 2):
        f = tuple(2 ** k if q == q1 else 0 for q in range(g.n))
        act = tuple(tuple(sorted([0, 1] * 2 ** (k - 1))) if q == q1 else None
                    for q in range(g.n))
        halves[k] = {succ_counting(g, f, act, b, 0)[q0] for b in range(2)}
    ok = (mism == 0 and abs_bad == 0
          and all(h == {2 ** (k - 1)} for k, h in halves.items()))
    report(10, ok, f"Succ mismatches {mism}/{checked}; Abs violations {abs_bad}; "
                   f"copies reaching q_0 from 2^k: {halves}")


def test_c11_gn(report):
    t0 = time.perf_counter()
    g = G(1)
    ans = solve_pos_reach_safe(g, k_cap=16)
    ok = ans.win and ans.diagnostics.get("verification") == "verified"
    report(11, ok, f"G_1 ({normalize(g).n} states): {ans.verdict}, witness "
                   f"{ans.diagnostics.get('verification')} ({time.perf_counter() - t0:.1f}s)")


def test_c12_determinacy(report):
    rng = random.Random(12)
    bad = sum(determinacy_violations(random_arena(rng)) for _ in range(1000))
    report(12, bad == 0, f"{bad} violations over 1000 arenas x 3 objectives")
