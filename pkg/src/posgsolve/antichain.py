"""Symbolic solving of the belief/obligation game with antichains.

Downward-closed sets of (s, o) pairs are stored by their maximal elements.
Pairs with o = ∅ and pairs with o ≠ ∅ are never comparable, so each
antichain keeps the two classes apart.

The predecessor operator works backwards: for an action a it picks, per
observation block γ, one element of the antichain that the γ-successor must
fall under (or "no successor in γ"), derives the largest s, witness u and
obligation o compatible with those picks, and keeps the candidate if it
really is a predecessor.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .answer import LOSE, WIN, QualitativeAnswer, check_mode
from .belief import (EMPTY, BeliefObligation, HAction1, IllegalAction, initial_pair,
                     require_p2_perfect, solve_pure, succ_h, witness_ok)
from .game import Game, bits, normalize, post_any_mask

Pair = BeliefObligation


def preceq(x: Pair, y: Pair) -> bool:
    return (x.s & ~y.s == 0 and x.o & ~y.o == 0 and (x.o == 0) == (y.o == 0))


@dataclass(frozen=True)
class Antichain:
    empty_class: frozenset[Pair] = frozenset()
    live_class: frozenset[Pair] = frozenset()

    @property
    def elems(self) -> list[Pair]:
        return sorted(self.empty_class) + sorted(self.live_class)

    def __len__(self) -> int:
        return len(self.empty_class) + len(self.live_class)

    def __contains__(self, x: Pair) -> bool:
        pool = self.empty_class if x.o == 0 else self.live_class
        return any(preceq(x, y) for y in pool)

    def __le__(self, other: "Antichain") -> bool:
        return all(x in other for x in self.elems)

    def check(self) -> bool:
        es = self.elems
        return all(not (x != y and preceq(x, y)) for x in es for y in es)


def insert(ac: Antichain, x: Pair) -> Antichain:
    if x in ac:
        return ac
    if x.o == 0:
        pool = frozenset(y for y in ac.empty_class if not preceq(y, x)) | {x}
        return Antichain(pool, ac.live_class)
    pool = frozenset(y for y in ac.live_class if not preceq(y, x)) | {x}
    return Antichain(ac.empty_class, pool)


def antichain_of(xs: Iterable[Pair]) -> Antichain:
    ac = Antichain()
    for x in sorted(xs, key=lambda p: -(bin(p.s).count("1") + bin(p.o).count("1"))):
        ac = insert(ac, x)
    return ac


def union(a: Antichain, b: Antichain) -> Antichain:
    for x in b.elems:
        a = insert(a, x)
    return a


def meet(x: Pair, t: Pair) -> Pair:
    return Pair(x.s & t.s, x.o & t.s)


def restrict(ac: Antichain, beliefs: Antichain) -> Antichain:
    """Closure of ac intersected with {(s,o) | s under some belief of `beliefs`}."""
    out = []
    for x in ac.elems:
        for t in beliefs.empty_class:
            m = meet(x, t)
            if (m.o == 0) == (x.o == 0):
                out.append(m)
    return antichain_of(out)


def _succ_in(game: Game, x: Pair, act: HAction1, ac: Antichain) -> bool:
    """All successors of x under act land inside the closure of ac."""
    if x.s == 0:
        return EMPTY in ac
    post = post_any_mask(game, x.s, act.a)
    for gamma, g in enumerate(game.obs1_masks):
        if post & g and succ_h(game, x, act, gamma) not in ac:
            return False
    return True


def cpre(game: Game, ac: Antichain) -> Antichain:
    """Maximal elements of {x | some legal (a,u) sends every successor into ac}."""
    game = normalize(game)
    require_p2_perfect(game)
    tm = game.target_mask
    live = game.full_mask & ~tm
    blocks = game.obs1_masks
    n_blocks = len(blocks)
    out = Antichain()
    if len(ac) == 0:
        return out
    if ac.empty_class:
        out = insert(out, EMPTY)
    for a in range(len(game.actions1)):
        reach = [game.succ_any[q][a] for q in range(game.n)]

        def s_ok(q, gamma, bound):
            # q's successors in block gamma (targets aside) fit under bound
            if bound is None:
                return reach[q] & blocks[gamma] == 0
            return reach[q] & blocks[gamma] & ~tm & ~bound == 0

        # class o = ∅: γ-successor (s2, s2) needs s2 ⊆ e.o for a live e, or s2 = ∅
        opts_e = []
        for gamma in range(n_blocks):
            g = blocks[gamma]
            cands = {None}
            if ac.empty_class:
                cands.add(0)
            for e in ac.live_class:
                cands.add(e.o & g)
            opts_e.append(_maximal_bounds(cands))
        for s in _combine(live, opts_e, s_ok, game.n):
            x = Pair(s, 0)
            if x not in out and _succ_in(game, x, HAction1(a, post_any_mask(game, s, a)), ac):
                out = insert(out, x)
        # class o ≠ ∅: per γ pick e; empty-class e forces o2 = ∅
        opts_n = []
        for gamma in range(n_blocks):
            g = blocks[gamma]
            cands = {(None, None)}
            for e in ac.empty_class:
                cands.add((e.s & g, None))
            for e in ac.live_class:
                cands.add((e.s & g, e.o & g))
            opts_n.append(sorted(cands, key=_key2))
        for s, u_parts in _combine_n(live, opts_n, s_ok, game.n):
            if s == 0:
                continue
            u = (tm | u_parts) & post_any_mask(game, s, a)
            o = 0
            for q in bits(s):
                if witness_ok(game, 1 << q, a, u):
                    o |= 1 << q
            if o == 0:
                continue
            x = Pair(s, o)
            if x in out:
                continue
            try:
                if _succ_in(game, x, HAction1(a, u), ac):
                    out = insert(out, x)
            except IllegalAction:
                pass
    return out


def _key(b):
    return (-1, 0) if b is None else (bin(b).count("1"), b)


def _key2(p):
    return (_key(p[0]), _key(p[1]))


def _maximal_bounds(cands: set) -> list:
    masks = [c for c in cands if c is not None]
    keep = [m for m in masks if not any(m != n and m & ~n == 0 for n in masks)]
    return [None] + sorted(keep)


def _combine(live: int, opts: list[list], s_ok, n: int):
    seen = set()

    def rec(i, s):
        if i == len(opts):
            if s not in seen:
                seen.add(s)
                yield s
            return
        for bound in opts[i]:
            s2 = s & _mask_ok(s, lambda q: s_ok(q, i, bound))
            yield from rec(i + 1, s2)

    yield from rec(0, live)


def _mask_ok(s: int, pred) -> int:
    m = 0
    for q in bits(s):
        if pred(q):
            m |= 1 << q
    return m


def _combine_n(live: int, opts: list[list], s_ok, n: int):
    """Yield (s, u-part) for every pick of per-block (s-bound, o-bound)."""
    seen = set()

    def rec(i, s, u):
        if i == len(opts):
            if (s, u) not in seen:
                seen.add((s, u))
                yield s, u
            return
        tried = set()
        for sb, ob in opts[i]:
            s2 = s & _mask_ok(s, lambda q: s_ok(q, i, sb))
            u2 = u | (ob or 0)
            if (s2, u2) in tried:
                continue
            tried.add((s2, u2))
            yield from rec(i + 1, s2, u2)

    yield from rec(0, live, 0)


def alpha(game: Game) -> Antichain:
    return Antichain(frozenset([Pair(game.full_mask & ~game.target_mask, 0)]), frozenset())


def explicit_cpre(game: Game, down: set[Pair]) -> set[Pair]:
    """Reference predecessor over every pair o ⊆ s ⊆ Q \\ T (small games)."""
    from .belief import legal_actions

    game = normalize(game)
    out = set()
    for x in all_pairs(game):
        if x.s == 0:
            if x in down:
                out.add(x)
            continue
        for act in legal_actions(game, x):
            post = post_any_mask(game, x.s, act.a)
            if all(succ_h(game, x, act, g) in down
                   for g, m in enumerate(game.obs1_masks) if post & m):
                out.add(x)
                break
    return out


def all_pairs(game: Game) -> list[Pair]:
    live = game.full_mask & ~game.target_mask
    out = []
    s = live
    while True:
        o = s
        while True:
            out.append(Pair(s, o))
            if o == 0:
                break
            o = (o - 1) & s
        if s == 0:
            break
        s = (s - 1) & live
    return out


def closure(game: Game, ac: Antichain) -> set[Pair]:
    return {x for x in all_pairs(game) if x in ac}


def solve_symbolic(game: Game, mode: str, witness: bool = False) -> QualitativeAnswer:
    check_mode(mode)
    game = normalize(game)
    require_p2_perfect(game)
    x0 = initial_pair(game)
    sizes: list[int] = []
    a = alpha(game)
    if mode == "positive":
        x = a
        while True:
            nx = union(a, cpre(game, x))
            sizes.append(len(nx))
            if nx == x:
                break
            x = nx
        win_set = x
    else:
        # S: beliefs from which alpha is revisited; kept as the o = ∅ class.
        # Working inside {(s,o) | s ∈ S} keeps every iterate downward closed.
        s_ac = Antichain(a.empty_class, frozenset())
        while True:
            y = s_ac
            while True:
                ny = union(s_ac, restrict(cpre(game, y), s_ac))
                sizes.append(len(ny))
                if ny == y:
                    break
                y = ny
            again = antichain_of(meet(e, t) for e in cpre(game, y).empty_class
                                 for t in s_ac.empty_class)
            if again == s_ac:
                break
            s_ac = again
        win_set = y
    diag = {"backend": "antichain", "antichain_sizes": sizes,
            "peak_antichain": max(sizes, default=0), "iterations": len(sizes)}
    if x0 not in win_set:
        return QualitativeAnswer(LOSE, None, diag)
    w = solve_pure(game, mode).witness if witness else None
    return QualitativeAnswer(WIN, w, diag)


__all__ = ["Antichain", "preceq", "insert", "cpre", "solve_symbolic", "explicit_cpre",
           "antichain_of", "closure", "all_pairs"]
