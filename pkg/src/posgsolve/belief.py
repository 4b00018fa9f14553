"""Belief/obligation game for player 1 partial, player 2 perfect.

An H-state is a pair (s, o) of state bitmasks with o ⊆ s: s is player 1's
belief with target states removed and o is the set of states that still
owe a positive-probability visit to the target. Player 1 moves with
(a, u), u being the declared witness set; player 2 answers with the next
player-1 observation block. Pairs with o = ∅ are the accepting ones.
"""
from __future__ import annotations

from itertools import product as cartesian
from typing import NamedTuple

from .answer import LOSE, WIN, BudgetExceeded, QualitativeAnswer, ScopeError, check_mode
from .arena import ArenaGame, Solution, solve_buchi, solve_reach
from .game import Game, bits, normalize, popcount, post_any_mask
from .transducer import Transducer, pure_move


class BeliefObligation(NamedTuple):
    s: int
    o: int


class HAction1(NamedTuple):
    a: int
    u: int


class IllegalAction(ValueError):
    pass


class IllegalObservation(ValueError):
    pass


EMPTY = BeliefObligation(0, 0)
WIN_SINK = ("win",)
LOSE_SINK = ("lose",)


def require_p2_perfect(game: Game) -> None:
    if game.side.player2 != "perfect":
        raise ScopeError("this construction needs player 2 to observe states perfectly")


def initial_pair(game: Game) -> BeliefObligation:
    require_p2_perfect(game)
    if game.init in game.target:
        return EMPTY
    m = 1 << game.init
    return BeliefObligation(m, m)


def fmt_pair(game: Game, x: BeliefObligation) -> str:
    def f(m):
        return "{" + ",".join(game.names(m)) + "}"
    return f"({f(x.s)},{f(x.o)})"


def witness_ok(game: Game, o: int, a: int, u: int) -> bool:
    """Condition (i): every obligation state can hit u whatever player 2 does."""
    for q in bits(o):
        for m in game.succ[q][a]:
            if not m & u:
                return False
    return True


def succ_h(game: Game, frm: BeliefObligation, act: HAction1,
           gamma: int) -> BeliefObligation:
    """Successor pair after player 1 plays act and player 1 then observes block gamma."""
    s, o = frm
    a, u = act
    post = post_any_mask(game, s, a)
    if u & ~post or not witness_ok(game, o, a, u):
        raise IllegalAction(f"{game.actions1[a]} with witness {game.names(u)} is not legal "
                            f"at {fmt_pair(game, frm)}")
    g = game.obs1_masks[gamma]
    if not post & g:
        raise IllegalObservation(f"observation {game.obs1_label(gamma)} cannot follow "
                                 f"{fmt_pair(game, frm)} under {game.actions1[a]}")
    tm = game.target_mask
    s2 = post & g & ~tm
    if o == 0:
        return BeliefObligation(s2, s2)
    o2 = post_any_mask(game, o, a) & g & u & ~tm
    return BeliefObligation(s2, o2)


def _subsets(mask: int):
    """All submasks of mask, including 0 and mask."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def legal_actions(game: Game, frm: BeliefObligation) -> list[HAction1]:
    """Every legal (a, u) with u ⊆ Post_a(s); largest witness first per action."""
    s, o = frm
    out = []
    for a in range(len(game.actions1)):
        post = post_any_mask(game, s, a)
        for u in _subsets(post):
            if witness_ok(game, o, a, u):
                out.append(HAction1(a, u))
    return out


def arena_actions(game: Game, frm: BeliefObligation) -> list[HAction1]:
    """Representative legal actions used when building the arena.

    Only u ∩ Post_a(o) influences the successor, so witnesses are drawn from
    subsets of Post_a(o); with o = ∅ the single witness Post_a(s) is used.
    """
    s, o = frm
    out = []
    for a in range(len(game.actions1)):
        post_s = post_any_mask(game, s, a)
        if o == 0:
            out.append(HAction1(a, post_s))
            continue
        post_o = post_any_mask(game, o, a)
        for u in _subsets(post_o):
            if witness_ok(game, o, a, u):
                out.append(HAction1(a, u))
    return out


def _label(game: Game, act: HAction1):
    return (game.actions1[act.a], tuple(game.names(act.u)))


class HArena(NamedTuple):
    arena: ArenaGame
    index: dict
    start: int
    h_states: int


def build_h(game: Game, objective: str) -> HArena:
    """Reachable part of H as a two-level turn-based arena.

    Player-1 vertices ("h", s, o) choose (a, u); player-2 vertices
    ("p2", s, o, a, u) choose the next observation block. Reachability of
    the o = ∅ vertices for positive, Büchi for almost-sure.
    """
    check_mode(objective)
    game = normalize(game)
    require_p2_perfect(game)
    names: list = []
    owner: list[int] = []
    edges: list[list] = []
    index: dict = {}
    todo: list[int] = []

    def vertex(key, own):
        if key not in index:
            index[key] = len(names)
            names.append(key)
            owner.append(own)
            edges.append([])
            todo.append(index[key])
        return index[key]

    l0 = initial_pair(game)
    start = vertex(("h", l0.s, l0.o), 1)
    h_count = 0
    while todo:
        v = todo.pop()
        key = names[v]
        if key[0] == "h":
            h_count += 1
            frm = BeliefObligation(key[1], key[2])
            if frm.s == 0:
                edges[v].append((("", ()), v))
                continue
            acts = arena_actions(game, frm)
            if not acts:
                edges[v].append((("~illegal", ()), vertex(LOSE_SINK, 1)))
            for act in acts:
                w = vertex(("p2", frm.s, frm.o, act.a, act.u), 2)
                edges[v].append((_label(game, act), w))
        elif key[0] == "p2":
            frm = BeliefObligation(key[1], key[2])
            act = HAction1(key[3], key[4])
            post = post_any_mask(game, frm.s, act.a)
            for gamma, g in enumerate(game.obs1_masks):
                if post & g:
                    nxt = succ_h(game, frm, act, gamma)
                    edges[v].append((gamma, vertex(("h", nxt.s, nxt.o), 1)))
            if not edges[v]:
                edges[v].append((-1, vertex(WIN_SINK, 2)))
        else:
            edges[v].append((key[0], v))
    goal = frozenset(i for i, k in enumerate(names)
                     if (k[0] == "h" and k[2] == 0) or k == WIN_SINK)
    kind = "buchi" if objective == "almost-sure" else "reach"
    bound = 3 ** game.n
    assert h_count <= bound, f"{h_count} H-states exceed 3^|Q| = {bound}"
    return HArena(ArenaGame(names, owner, edges, goal, kind), index, start, h_count)


def _solve_arena(h: HArena) -> Solution:
    return solve_buchi(h.arena) if h.arena.kind == "buchi" else solve_reach(h.arena)


def solve_pure(game: Game, mode: str, extract: bool = True) -> QualitativeAnswer:
    check_mode(mode)
    game = normalize(game)
    h = build_h(game, mode)
    sol = _solve_arena(h)
    diag = {"h_states": h.h_states, "arena_vertices": h.arena.n,
            "iterations": sol.iterations, "backend": "explicit"}
    if h.start not in sol.win:
        return QualitativeAnswer(LOSE, None, diag)
    witness = extract_transducer(game, sol, h) if extract else None
    if witness is not None:
        diag["witness_memory"] = witness.size
    return QualitativeAnswer(WIN, witness, diag)


def extract_transducer(game: Game, h_strategy: Solution, h: HArena) -> Transducer:
    """Turn a memoryless H-strategy into a pure transducer for G.

    Memory values are the H-states reachable under the strategy plus a
    start value. Memory ℓ means "the current H-state was ℓ one step ago";
    reading block γ moves to succ_h(ℓ, σ(ℓ), γ) and plays σ of that state.
    """
    game = normalize(game)
    arena = h.arena
    strat = h_strategy.strategy
    by_label = {}
    for v in range(arena.n):
        for lab, w in arena.edges[v]:
            by_label[(v, lab)] = w

    def act_of(v) -> HAction1 | None:
        key = arena.names[v]
        if key[0] != "h" or key[1] == 0 or v not in strat:
            return None
        w = by_label[(v, strat[v])]
        k2 = arena.names[w]
        if k2[0] != "p2":
            return None
        return HAction1(k2[3], k2[4])

    def step(v, gamma) -> int | None:
        act = act_of(v)
        if act is None:
            return None
        key = arena.names[v]
        frm = BeliefObligation(key[1], key[2])
        try:
            nxt = succ_h(game, frm, act, gamma)
        except IllegalObservation:
            return None
        return h.index[("h", nxt.s, nxt.o)]

    n_obs = len(game.obs1)
    mem = ["pre", h.start]
    seen = {h.start}
    i = 1
    while i < len(mem):
        v = mem[i]
        for gamma in range(n_obs):
            w = step(v, gamma)
            if w is not None and w not in seen:
                seen.add(w)
                mem.append(w)
        i += 1
    pos = {v: j for j, v in enumerate(mem)}
    gamma0 = game.obs1_of[game.init]
    nxt_t, upd_t, labels = [], [], []
    for j, v in enumerate(mem):
        rn, ru = [], []
        for gamma in range(n_obs):
            if v == "pre":
                w = h.start if gamma == gamma0 else None
            else:
                w = step(v, gamma)
            if w is None:
                rn.append(pure_move(0))
                ru.append(j)
            else:
                act = act_of(w)
                rn.append(pure_move(act.a if act else 0))
                ru.append(pos[w])
        nxt_t.append(tuple(rn))
        upd_t.append(tuple(ru))
        labels.append("start" if v == "pre" else
                      fmt_pair(game, BeliefObligation(arena.names[v][1], arena.names[v][2])))
    t = Transducer(actions=game.actions1, n_obs=n_obs, m0=0, update=tuple(upd_t),
                   next=tuple(nxt_t), labels=tuple(labels))
    return t.minimized()


def belief_automaton(game: Game, cap: int = 4096) -> list[int]:
    """Beliefs (state masks) reachable from {init} under any actions."""
    game = normalize(game)
    start = 1 << game.init
    seen = {start}
    order = [start]
    i = 0
    while i < len(order):
        b = order[i]
        for a in range(len(game.actions1)):
            p = post_any_mask(game, b, a)
            for g in game.obs1_masks:
                nb = p & g
                if nb and nb not in seen:
                    if len(seen) >= cap:
                        raise BudgetExceeded(f"belief automaton exceeds {cap} beliefs")
                    seen.add(nb)
                    order.append(nb)
        i += 1
    return order


def belief_transducer(game: Game, choice: dict[int, int]) -> Transducer:
    """Memoryless-over-beliefs strategy: memory is the predicted belief
    post(B, a) before the next observation refines it."""
    game = normalize(game)
    n_obs = len(game.obs1)
    keys = [1 << game.init]
    idx = {keys[0]: 0}
    rows_n, rows_u = [], []
    i = 0
    while i < len(keys):
        pred = keys[i]
        rn, ru = [], []
        for gamma in range(n_obs):
            cur = pred & game.obs1_masks[gamma]
            if not cur:
                rn.append(pure_move(0))
                ru.append(i)
                continue
            a = choice.get(cur, 0)
            nxt = post_any_mask(game, cur, a)
            if nxt not in idx:
                idx[nxt] = len(keys)
                keys.append(nxt)
            rn.append(pure_move(a))
            ru.append(idx[nxt])
        rows_n.append(tuple(rn))
        rows_u.append(tuple(ru))
        i += 1
    return Transducer(actions=game.actions1, n_obs=n_obs, m0=0, update=tuple(rows_u),
                      next=tuple(rows_n),
                      labels=tuple("{" + ",".join(game.names(k)) + "}" for k in keys))


def belief_memoryless_insufficiency(game: Game, mode: str, cap: int = 16) -> bool:
    """True iff no strategy choosing one action per reachable belief wins.

    Every assignment of actions to the beliefs of the belief automaton is
    built as a transducer and checked exactly by the oracle.
    """
    from .oracle import verify_witness

    check_mode(mode)
    game = normalize(game)
    require_p2_perfect(game)
    beliefs = belief_automaton(game)
    live = [b for b in beliefs if b & ~game.target_mask]
    if len(live) > cap:
        raise BudgetExceeded(f"{len(live)} beliefs exceed the enumeration cap {cap}")
    for acts in cartesian(range(len(game.actions1)), repeat=len(live)):
        sigma = belief_transducer(game, dict(zip(live, acts)))
        if verify_witness(game, sigma, mode).verified:
            return False
    return True


def h_state_count(game: Game, mode: str = "positive") -> int:
    return build_h(game, mode).h_states


__all__ = [
    "BeliefObligation", "HAction1", "IllegalAction", "IllegalObservation", "initial_pair",
    "succ_h", "legal_actions", "build_h", "solve_pure", "extract_transducer",
    "belief_memoryless_insufficiency", "belief_automaton", "belief_transducer", "popcount",
]
