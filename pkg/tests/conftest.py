import random

import pytest
from hypothesis import HealthCheck, settings

from posgsolve import randgen
from posgsolve.fixtures import fig1, fig3, fig9

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def g1():
    return fig1()


@pytest.fixture(scope="session")
def g3():
    return fig3()


@pytest.fixture(scope="session")
def g9():
    return fig9()


def small_games(seed, count, **kw):
    return randgen.corpus(seed, count, randgen.GenConfig(**kw))


def rng_game(seed, **kw):
    return randgen.random_game(random.Random(seed), randgen.GenConfig(**kw))


def random_arena(rng: random.Random, n: int | None = None, kind: str = "reach"):
    from posgsolve.arena import ArenaGame

    n = n or rng.randint(1, 8)
    edges = []
    for _ in range(n):
        succ = rng.sample(range(n), rng.randint(1, min(3, n)))
        edges.append([(i, w) for i, w in enumerate(succ)])
    goal = frozenset(v for v in range(n) if rng.random() < 0.3)
    return ArenaGame(list(range(n)), [rng.choice((1, 2)) for _ in range(n)], edges, goal, kind)


def reduction_disagreements(g, mode: str = "almost-sure") -> list[str]:
    """Check that verdicts survive both strategy-class reductions.

    g must have a perfectly informed player 2 so the explicit solver is
    exact on g and on its subset-action game. The doubled game hides the
    copy states from player 2, so its losing side is checked by bounded
    search: any win found there must map back to a win in g.
    """
    from posgsolve.belief import solve_pure
    from posgsolve.oracle import brute_force_decide, verify_witness
    from posgsolve.reductions import lift_strategy, pure_to_rand, rand_to_pure, transfer_strategy

    out = []
    pure = solve_pure(g, mode)
    h, cert = pure_to_rand(g)
    if pure.win:
        if not verify_witness(h, lift_strategy(cert, pure.witness), mode).verified:
            out.append("pure2rand: lifted witness fails")
    else:
        found = brute_force_decide(h, mode, cls="rand-invisible", p1_mem=2, budget=50_000)
        if found.win:
            out.append("pure2rand: constructed game won while the source is lost")
    r, rcert = rand_to_pure(g)
    rand = solve_pure(r, mode)
    if rand.win:
        if not verify_witness(g, transfer_strategy(rcert, rand.witness), mode).verified:
            out.append("rand2pure: transferred witness fails")
    elif pure.win:
        out.append("rand2pure: pure win without a subset-game win")
    return out


def succ_oracle_mismatches(games, rng: random.Random, horizon: int = 4, runs: int = 3):
    """Replay random rounds with explicit play prefixes and compare the
    per-state prefix counts with the counting successor."""
    from posgsolve.counting import succ_counting
    from posgsolve.game import bits, normalize

    bad = checked = 0
    for game in games:
        g = normalize(game)
        for _ in range(runs):
            prefixes = [(g.init,)]
            f = tuple(1 if q == g.init else 0 for q in range(g.n))
            for _ in range(horizon):
                if not prefixes:
                    break
                choice = [rng.randrange(len(g.actions1)) for _ in prefixes]
                # counting actions list each state's copies in sorted order
                order = sorted(range(len(prefixes)), key=lambda i: (prefixes[i][-1], choice[i]))
                prefixes = [prefixes[i] for i in order]
                choice = [choice[i] for i in order]
                act = tuple(tuple(c for p, c in zip(prefixes, choice) if p[-1] == q)
                            if f[q] else None for q in range(g.n))
                b = rng.randrange(len(g.actions2))
                gamma = rng.randrange(len(g.obs2))
                got = succ_counting(g, f, act, b, gamma)
                prefixes = [p + (t,) for p, a in zip(prefixes, choice)
                            for t in bits(g.succ[p[-1]][a][b] & g.obs2_masks[gamma])]
                want = tuple(sum(1 for p in prefixes if p[-1] == q) for q in range(g.n))
                bad += got != want
                checked += 1
                f = got
    return bad, checked


def abs_monotone_violations(n: int, cap: int) -> int:
    """Exhaustive over value maps in {0..cap+1, OMEGA}^n: Abs only raises
    values, and raising one input value never lowers the OMEGA count."""
    from itertools import product

    from posgsolve.counting import OMEGA, KLadder, abs_counting

    lad = KLadder(n, 2, cap)
    vals = list(range(cap + 2)) + [OMEGA]

    def le(x, y):
        return y == OMEGA or (x != OMEGA and x <= y)

    bad = 0
    for f in product(vals, repeat=n):
        af = abs_counting(f, lad)
        bad += not all(le(x, y) for x, y in zip(f, af))
        n_omega = sum(x == OMEGA for x in af)
        for q in range(n):
            for v in vals:
                if f[q] != OMEGA and le(f[q], v) and v != f[q]:
                    ag = abs_counting(f[:q] + (v,) + f[q + 1:], lad)
                    bad += n_omega > sum(x == OMEGA for x in ag)
    return bad
