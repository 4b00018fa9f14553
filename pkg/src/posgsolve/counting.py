"""Player 1 perfect, player 2 partial: counting abstraction and Restart/Play.

Player 1 observes states and player 2's actions, so games whose player-2
actions cannot be read off the successor state are first passed through
reveal_p2_actions; witnesses refer to that revealed game.

A counting function f maps each state to the number of play prefixes that
player 2 cannot tell apart and that end there, or to OMEGA when that
number is "large". Player 1 assigns an action to every such copy; player 2
picks its action; the next player-2 observation is then drawn, and since
the objective is positive reachability, the draw is resolved in player 1's
favour while safety is enforced by restricting to safe actions.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from itertools import combinations_with_replacement
from typing import Iterable, Sequence

from .answer import LOSE, UNKNOWN, WIN, BudgetExceeded, QualitativeAnswer, ScopeError
from .arena import ArenaGame, solve_reach, solve_safety
from .game import Game, bits, normalize, p2_actions_revealed, reveal_p2_actions, with_init
from .transducer import Transducer, pure_move

OMEGA = -1
DEFAULT_K_CAP = int(os.environ.get("POSG_K_CAP", "64"))
DEFAULT_NODE_BUDGET = 200_000

CountingFunction = tuple  # per state: count >= 0 or OMEGA
# per state: None off the support, a sorted tuple of per-copy actions for a
# finite count, or a frozenset of actions for an OMEGA state
CountingAction = tuple


def _capped_pow(base: int, exp: int, cap: int) -> tuple[int, bool]:
    if base <= 1:
        return base, False
    if exp > cap.bit_length():
        return cap, True
    v = base ** exp
    return (cap, True) if v > cap else (v, False)


@dataclass(frozen=True)
class KLadder:
    """Promotion thresholds K_1 < K_2 < ... < K_n, each capped at `cap`."""

    n_states: int
    n_actions: int
    cap: int = DEFAULT_K_CAP
    values: tuple[int, ...] = field(init=False)
    truncated: tuple[bool, ...] = field(init=False)

    def __post_init__(self):
        if self.cap < 2 * max(self.n_actions, 1):
            raise ValueError(f"k-cap must be at least 2*|A1| = {2 * self.n_actions}")
        vals, trunc = [], []
        k, t = _capped_pow(self.n_actions, 2 ** min(self.n_states, 64), self.cap)
        vals.append(k)
        trunc.append(t)
        for i in range(1, self.n_states):
            prev = vals[-1]
            if trunc[-1] or prev >= self.cap:
                vals.append(self.cap)
                trunc.append(True)
                continue
            e = prev ** i if prev ** i <= 4 * self.cap.bit_length() else 4 * self.cap.bit_length()
            p, t = _capped_pow(self.n_actions, e, self.cap)
            v = prev * p
            if t or v > self.cap:
                vals.append(self.cap)
                trunc.append(True)
            else:
                vals.append(v)
                trunc.append(False)
        object.__setattr__(self, "values", tuple(vals))
        object.__setattr__(self, "truncated", tuple(trunc))

    def K(self, i: int) -> int:
        return self.values[i - 1]

    def is_truncated(self, i: int) -> bool:
        return self.truncated[i - 1]


def require_p1_perfect(game: Game) -> None:
    if game.side.player1 != "perfect":
        raise ScopeError("this construction needs player 1 to observe states perfectly")


def revealed(game: Game) -> tuple[Game, tuple | None]:
    """The game player 1 actually plays: player-2 actions made observable.

    Returns the game and its (state, tag) table, or None when nothing had to
    be revealed. Of the minimal and the full tagging the smaller is kept.
    """
    game = normalize(game)
    if p2_actions_revealed(game):
        return game, None
    best = min((reveal_p2_actions(game, m) for m in (True, False)), key=lambda rk: rk[0].n)
    return normalize(best[0]), best[1]


def _ids(game: Game, xs: Iterable | None, default: Iterable[int]) -> frozenset[int]:
    if xs is None:
        return frozenset(default)
    return frozenset(game.state_id(x) for x in xs)


def _safe_arena(game: Game, qg: frozenset[int]) -> ArenaGame:
    n = game.n
    names: list = list(range(n))
    owner = [1] * n
    edges: list[list] = [[] for _ in range(n)]
    for q in range(n):
        for a in range(len(game.actions1)):
            v = len(names)
            names.append((q, a))
            owner.append(2)
            edges.append([(t, t) for t in bits(game.succ_any[q][a])])
            edges[q].append((a, v))
    goal = frozenset(qg) | frozenset(range(n, len(names)))
    return ArenaGame(names, owner, edges, goal, "safety")


def win_safe(game: Game, qg: Iterable[int]) -> frozenset[int]:
    sol = solve_safety(_safe_arena(game, frozenset(qg)))
    return frozenset(v for v in sol.win if v < game.n)


def safe_actions(game: Game, qg: Iterable | None = None) -> list[tuple[int, ...]]:
    """Per state, the actions whose every successor stays sure-safe in qg."""
    game = normalize(game)
    require_p1_perfect(game)
    qs = _ids(game, qg, range(game.n))
    w = win_safe(game, qs)
    wm = sum(1 << q for q in w)
    out = []
    for q in range(game.n):
        if q not in w:
            out.append(())
            continue
        out.append(tuple(a for a in range(len(game.actions1))
                         if game.succ_any[q][a] & ~wm == 0))
    return out


def compute_z(game: Game, t: Iterable | None = None, qg: Iterable | None = None) -> frozenset[int]:
    """States where playing the safe actions uniformly at random reaches t
    with positive probability against every observation-based player 2."""
    from fractions import Fraction

    from .game import make_dist
    from .oracle import Mdp, pomdp_almost_sure_safety

    game = normalize(game)
    require_p1_perfect(game)
    tgt = _ids(game, t, game.target)
    safe = safe_actions(game, qg)
    trans = []
    for q in range(game.n):
        acts = safe[q] or tuple(range(len(game.actions1)))
        w = Fraction(1, len(acts))
        trans.append([make_dist((x, p * w) for a in acts for x, p in game.delta[q][a][b])
                      for b in range(len(game.actions2))])
    obs = [game.obs2_of[q] for q in range(game.n)]
    perfect2 = game.side.player2 == "perfect"
    z = set(tgt)
    avoid = [q for q in range(game.n) if q not in tgt]
    for q in range(game.n):
        if q in tgt or not safe[q]:
            continue
        mdp = Mdp(labels=list(range(game.n)), start=q, trans=trans, obs=obs,
                  target=frozenset(tgt), adversary_perfect=perfect2)
        if not pomdp_almost_sure_safety(mdp, avoid):
            z.add(q)
    return frozenset(z)


def succ_counting(game: Game, f: CountingFunction, act: CountingAction, b: int,
                  gamma: int) -> tuple[int, ...]:
    """Raw successor counts inside player-2 block gamma (no abstraction)."""
    block = game.obs2_masks[gamma]
    omega_hit = 0
    counts = [0] * game.n
    for q in range(game.n):
        c = f[q]
        if c == 0:
            continue
        if act[q] is None:
            raise ValueError(f"action undefined on state {game.states[q]}")
        if c == OMEGA:
            for a in act[q]:
                omega_hit |= game.succ[q][a][b]
            continue
        if len(act[q]) != c:
            raise ValueError(f"action covers {len(act[q])} copies of {game.states[q]}, need {c}")
        for a in act[q]:
            for t in bits(game.succ[q][a][b] & block):
                counts[t] += 1
    out = []
    for t in range(game.n):
        if not block >> t & 1:
            out.append(0)
        elif omega_hit >> t & 1:
            out.append(OMEGA)
        else:
            out.append(counts[t])
    return tuple(out)


def abs_counting(f: Sequence[int], ladder: KLadder) -> tuple[int, ...]:
    return abs_counting_info(f, ladder)[0]


def abs_counting_info(f: Sequence[int], ladder: KLadder) -> tuple[tuple[int, ...], bool]:
    """n-fold promotion to OMEGA; also reports whether a capped threshold fired."""
    g = list(f)
    n = ladder.n_states
    capped = False
    for _ in range(n):
        k = sum(1 for x in g if x == OMEGA)
        if k >= n:
            break
        thr = ladder.K(n - k)
        hit = next((q for q, x in enumerate(g) if x != OMEGA and x > thr), None)
        if hit is None:
            break
        capped |= ladder.is_truncated(n - k)
        g[hit] = OMEGA
    return tuple(g), capped


def _actions_for(f: CountingFunction, safe: list[tuple[int, ...]]):
    per = []
    for q, c in enumerate(f):
        if c == 0:
            per.append([None])
        elif c == OMEGA:
            acts = safe[q]
            per.append([frozenset(x for i, x in enumerate(acts) if m >> i & 1)
                        for m in range(1, 1 << len(acts))])
        else:
            per.append(list(combinations_with_replacement(safe[q], c)))
    return per


def _act_label(act: CountingAction):
    return tuple((q, 1, tuple(sorted(x))) if isinstance(x, frozenset) else (q, 0, x)
                 for q, x in enumerate(act) if x is not None)


def fmt_counting(game: Game, f: CountingFunction) -> str:
    return "{" + ", ".join(f"{game.states[q]}:{'w' if c == OMEGA else c}"
                           for q, c in enumerate(f) if c) + "}"


@dataclass
class CountingGame:
    game: Game
    arena: ArenaGame
    index: dict
    start: int
    z: frozenset[int]
    safe: list[tuple[int, ...]]
    ladder: KLadder
    capped: bool
    h_states: int
    z_goal: bool
    _memo: dict = field(default_factory=dict, repr=False)

    def branch(self, f: CountingFunction, act: CountingAction, b: int) -> dict[int, tuple]:
        """Abstracted successors per player-2 observation block."""
        key = (f, act, b)
        if key not in self._memo:
            out = {}
            for gamma in range(len(self.game.obs2)):
                raw = succ_counting(self.game, f, act, b, gamma)
                if any(raw):
                    out[gamma] = abs_counting(raw, self.ladder)
            self._memo[key] = out
        return self._memo[key]


def _contributions(game: Game, q: int, x, nb: int):
    """Per b: (count vector, OMEGA mask) of one state's copies under option x."""
    out = []
    for b in range(nb):
        if isinstance(x, frozenset):
            m = 0
            for a in x:
                m |= game.succ[q][a][b]
            out.append((None, m))
            continue
        cnt = [0] * game.n
        for a in x:
            for t in bits(game.succ[q][a][b]):
                cnt[t] += 1
        out.append((cnt, 0))
    return out


def _enumerate_moves(game: Game, f, safe):
    """Yield (act, per-b raw (counts, OMEGA mask)) for every counting action,
    summing per-state contributions along a shared-prefix product."""
    nb = len(game.actions2)
    n = game.n
    opts = _actions_for(f, safe)
    supp = [q for q in range(n) if f[q]]
    contrib = {q: [_contributions(game, q, x, nb) for x in opts[q]] for q in supp}
    act = [None] * n

    def rec(i, sums):
        if i == len(supp):
            yield tuple(act), sums
            return
        q = supp[i]
        for k, x in enumerate(opts[q]):
            act[q] = x
            c = contrib[q][k]
            nxt = []
            for b in range(nb):
                cnt, om = sums[b]
                cc, co = c[b]
                if cc is not None:
                    cnt = [u + v for u, v in zip(cnt, cc)]
                nxt.append((cnt, om | co))
            yield from rec(i + 1, nxt)
        act[q] = None

    yield from rec(0, [([0] * n, 0) for _ in range(nb)])


def _is_target(f, tgt_mask: int, z: frozenset[int] | None) -> bool:
    supp = [q for q, c in enumerate(f) if c]
    if any(tgt_mask >> q & 1 for q in supp):
        return True
    return z is not None and bool(supp) and all(f[q] == OMEGA and q in z for q in supp)


def build_counting_game(game: Game, t: Iterable | None = None, qg: Iterable | None = None,
                        ladder: KLadder | None = None,
                        budget: int = DEFAULT_NODE_BUDGET, z_goal: bool = True) -> CountingGame:
    """On-the-fly arena from the count-1 function at the initial state.

    Levels: counting function (player 1 picks a safe counting action),
    then player 2 picks b, then player 1 picks the observation branch.
    With z_goal off, only counting functions touching t are goals.
    """
    game = normalize(game)
    require_p1_perfect(game)
    tgt = _ids(game, t, game.target)
    tm = sum(1 << q for q in tgt)
    qgs = _ids(game, qg, range(game.n))
    if not tgt <= qgs:
        raise ValueError("target must lie inside the safe set")
    ladder = ladder or KLadder(game.n, len(game.actions1))
    safe = safe_actions(game, qgs)
    z = compute_z(game, tgt, qgs)
    zg = z if z_goal else None
    names: list = []
    owner: list[int] = []
    edges: list[list] = []
    index: dict = {}
    todo: list[int] = []
    capped = False
    abs_memo: dict = {}
    blocks = [bits(m) for m in game.obs2_masks]

    def vertex(key, own):
        if key not in index:
            if len(names) >= budget:
                raise BudgetExceeded(f"counting game exceeds {budget} vertices")
            index[key] = len(names)
            names.append(key)
            owner.append(own)
            edges.append([])
            todo.append(index[key])
        return index[key]

    f0 = tuple(1 if q == game.init else 0 for q in range(game.n))
    start = vertex(("f", f0), 1)
    lose = None
    h_states = 0
    while todo:
        v = todo.pop()
        key = names[v]
        kind = key[0]
        if kind == "f":
            h_states += 1
            f = key[1]
            if _is_target(f, tm, zg):
                edges[v].append(("", v))
                continue
            supp = [q for q, c in enumerate(f) if c]
            if any(not safe[q] for q in supp):
                if lose is None:
                    lose = vertex(("lose",), 1)
                edges[v].append(("~unsafe", lose))
                continue
            seen_moves: dict = {}
            for act, sums in _enumerate_moves(game, f, safe):
                per_b = []
                for cnt, om in sums:
                    outs = set()
                    for blk in blocks:
                        raw = [0] * game.n
                        hit = False
                        for t in blk:
                            x = OMEGA if om >> t & 1 else cnt[t]
                            if x:
                                raw[t] = x
                                hit = True
                        if not hit:
                            continue
                        raw = tuple(raw)
                        res = abs_memo.get(raw)
                        if res is None:
                            res = abs_memo[raw] = abs_counting_info(raw, ladder)
                        capped |= res[1]
                        outs.add(res[0])
                    per_b.append(tuple(sorted(outs)))
                sig = tuple(per_b)
                lab = _act_label(act)
                if sig in seen_moves:
                    continue
                seen_moves[sig] = lab
                w = vertex(("fa", sig), 2)
                edges[v].append((lab, w))
        elif kind == "fa":
            for b, outs in enumerate(key[1]):
                edges[v].append((b, vertex(("fb", outs), 1)))
        elif kind == "fb":
            for i, f2 in enumerate(key[1]):
                edges[v].append((i, vertex(("f", f2), 1)))
        else:
            edges[v].append(("", v))
    goal = frozenset(i for i, k in enumerate(names)
                     if k[0] == "f" and _is_target(k[1], tm, zg))
    arena = ArenaGame(names, owner, edges, goal, "reach")
    return CountingGame(game, arena, index, start, z, safe, ladder, capped, h_states, z_goal)


def _decode_act(cg: CountingGame, f, lab) -> CountingAction:
    act: list = [None] * cg.game.n
    for q, kind, x in lab:
        act[q] = frozenset(x) if kind == 1 else tuple(x)
    return tuple(act)


def counting_transducer(cg: CountingGame, strategy: dict) -> tuple[Transducer, int]:
    """Pure transducer for the concrete game from a memoryless counting strategy.

    Memory is (f, q, j, a): the counting function, the state and copy index
    the play is on, and the action just played there. Reading the next state
    gives player 2's action, the next counting function and the new copy
    index. Copies of OMEGA states rotate through the chosen support. After a
    target counting function is reached the strategy keeps to safe actions.
    Returns the transducer and the number of counting steps to the target.
    """
    g = cg.game
    arena = cg.arena
    n_obs = len(g.obs1)
    obs_state = [next(iter(blk)) for blk in g.obs1]
    tm = g.target_mask
    n_a = len(g.actions1)

    def chosen(f):
        v = cg.index.get(("f", f))
        if v is None or v not in strategy or arena.names[v][0] != "f":
            return None
        lab = strategy[v]
        if lab in ("", "~unsafe"):
            return None
        return _decode_act(cg, f, lab)

    def play(f, q, j):
        act = chosen(f) if f is not None else None
        if act is None or act[q] is None:
            acts = cg.safe[q] or (0,)
            return acts[j % len(acts)]
        x = act[q]
        if isinstance(x, frozenset):
            xs = sorted(x)
            return xs[j % len(xs)]
        return x[j]

    def advance(mem, q2):
        f, q, j, a = mem
        if f is None:
            return (None, q2, (j + 1) % max(n_a, 1))
        act = chosen(f)
        if act is None:
            return (None, q2, (j + 1) % max(n_a, 1))
        b = next((b for b in range(len(g.actions2)) if g.succ[q][a][b] >> q2 & 1), None)
        if b is None:
            return (None, q2, 0)
        branch = cg.branch(f, act, b)
        f2 = branch.get(g.obs2_of[q2])
        if f2 is None:
            return (None, q2, 0)
        if f[q] == OMEGA:
            return (f2, q2, (j + q + 1) % max(n_a, 1)) if f2[q2] == OMEGA else (None, q2, 0)
        pos = 0
        for p in range(g.n):
            c = f[p]
            if c in (0, OMEGA):
                continue
            for i in range(c):
                if g.succ[p][act[p][i]][b] >> q2 & 1:
                    if (p, i) == (q, j):
                        return (f2, q2, pos % max(n_a, 1) if f2[q2] == OMEGA else pos)
                    pos += 1
        return (None, q2, 0)

    f0 = tuple(1 if q == g.init else 0 for q in range(g.n))
    mems: list = ["start"]
    idx = {"start": 0}
    rows_n, rows_u = [], []
    i = 0
    while i < len(mems):
        mem = mems[i]
        rn, ru = [], []
        for o in range(n_obs):
            q2 = obs_state[o]
            if mem == "start":
                cur = (f0, q2, 0) if q2 == g.init else (None, q2, 0)
            else:
                cur = advance(mem, q2)
            if cur[0] is not None and not _is_target(cur[0], tm, cg.z if cg.z_goal else None) and chosen(cur[0]) is None:
                cur = (None, q2, 0)
            f2, q2, j2 = cur
            a2 = play(f2, q2, j2)
            nxt = (f2, q2, j2, a2)
            if nxt not in idx:
                idx[nxt] = len(mems)
                mems.append(nxt)
            rn.append(pure_move(a2))
            ru.append(idx[nxt])
        rows_n.append(tuple(rn))
        rows_u.append(tuple(ru))
        i += 1
        if len(mems) > 200_000:
            raise BudgetExceeded("witness transducer too large")

    def lab(m):
        if m == "start":
            return "start"
        f, q, j, a = m
        head = "safe" if f is None else fmt_counting(g, f)
        return f"{head}@{g.states[q]}#{j}"

    t = Transducer(actions=g.actions1, n_obs=n_obs, m0=0, update=tuple(rows_u),
                   next=tuple(rows_n), labels=tuple(lab(m) for m in mems))
    steps = _depth(cg, strategy)
    return t.minimized(), steps


def _depth(cg: CountingGame, strategy: dict) -> int:
    """Counting steps along the longest strategy-consistent path to the goal."""
    from .arena import attractor

    rank, _ = attractor(cg.arena, cg.arena.goal, 1)
    r = rank.get(cg.start, 0)
    return max(1, (r + 2) // 3)


def solve_pos_reach_safe(game: Game, t: Iterable | None = None, qg: Iterable | None = None,
                         ladder: KLadder | None = None, k_cap: int | None = None,
                         budget: int = DEFAULT_NODE_BUDGET, verify: bool = True) -> QualitativeAnswer:
    """Positive reachability of t together with almost-sure safety in qg."""
    game = normalize(game)
    require_p1_perfect(game)
    r, keys = revealed(game)
    was_revealed = keys is not None
    t_r, qg_r = _lift_sets(game, keys, t, qg)
    return _solve_prs(r, t_r, qg_r, ladder, k_cap, budget, verify, was_revealed)


def _lift_sets(game, keys, t, qg):
    t_ids = _ids(game, t, game.target)
    qg_ids = _ids(game, qg, range(game.n))
    if keys is None:
        return t_ids, qg_ids
    return (frozenset(i for i, (q, _) in enumerate(keys) if q in t_ids),
            frozenset(i for i, (q, _) in enumerate(keys) if q in qg_ids))


def _graph_reachable(r: Game, t: frozenset[int], qg: frozenset[int]) -> bool:
    safe = safe_actions(r, qg)
    seen = {r.init}
    stack = [r.init]
    while stack:
        q = stack.pop()
        if q in t:
            return True
        for a in safe[q]:
            for x in bits(r.succ_any[q][a]):
                if x not in seen:
                    seen.add(x)
                    stack.append(x)
    return False


def cap_schedule(n_actions: int, k_cap: int) -> list[int]:
    """Caps tried in order: 2|A1|, doubling, ending at k_cap."""
    lo = 2 * max(n_actions, 1)
    if k_cap < lo:
        raise ValueError(f"k-cap must be at least 2*|A1| = {lo}")
    caps = []
    c = lo
    while c < k_cap:
        caps.append(c)
        c *= 2
    caps.append(k_cap)
    return caps


def _solve_prs(r: Game, t: frozenset[int], qg: frozenset[int], ladder, k_cap, budget,
               verify: bool, was_revealed: bool) -> QualitativeAnswer:
    """Deepen the cap; the first verified witness wins. A losing arena with
    no capped promotion is exact, so it settles lose at once."""
    if ladder is not None:
        ladders = [ladder]
    else:
        ladders = [KLadder(r.n, len(r.actions1), c)
                   for c in cap_schedule(len(r.actions1), k_cap or DEFAULT_K_CAP)]
    attempts = []
    last = None
    for lad in ladders:
        for z_goal in (False, True):
            ans = _attempt(r, t, qg, lad, budget, verify, was_revealed, z_goal)
            attempts.append((lad.cap, z_goal, ans.verdict, ans.diagnostics.get("reason")))
            last = ans
            if ans.verdict == WIN:
                ans.diagnostics["attempts"] = attempts
                return ans
            if z_goal and ans.verdict == LOSE:
                ans.diagnostics["attempts"] = attempts
                return ans
            if "exceeds" in (ans.diagnostics.get("reason") or ""):
                break
        else:
            continue
        break
    diag = dict(last.diagnostics)
    diag["attempts"] = attempts
    if last.verdict == LOSE:
        diag["reason"] = "only the strict arena lost"
    return QualitativeAnswer(UNKNOWN, None, diag)


def _attempt(r, t, qg, ladder, budget, verify, was_revealed, z_goal) -> QualitativeAnswer:
    from .oracle import verify_witness

    diag = {"backend": "counting", "revealed": was_revealed, "k_cap": ladder.cap,
            "game_states": r.n, "z_goal": z_goal}
    if not _graph_reachable(r, t, qg):
        diag["reason"] = "no target state reachable through safe actions"
        return QualitativeAnswer(LOSE, None, diag)
    try:
        cg = build_counting_game(r, t, qg, ladder, budget, z_goal)
    except BudgetExceeded as e:
        diag["reason"] = str(e)
        return QualitativeAnswer(UNKNOWN, None, diag)
    sol = solve_reach(cg.arena)
    diag.update(counting_states=cg.h_states, arena_vertices=cg.arena.n,
                cap_fired=cg.capped, z=sorted(r.states[q] for q in cg.z))
    if cg.start not in sol.win:
        if cg.capped:
            diag["reason"] = "a capped promotion threshold fired; region may be truncated"
            return QualitativeAnswer(UNKNOWN, None, diag)
        return QualitativeAnswer(LOSE, None, diag)
    try:
        sigma, steps = counting_transducer(cg, sol.strategy)
    except BudgetExceeded as e:
        diag["reason"] = str(e)
        return QualitativeAnswer(UNKNOWN, None, diag)
    diag["steps"] = steps
    diag["witness_memory"] = sigma.size
    diag["witness_game"] = r
    if verify:
        gv = replace(r, target=t, safe=qg)
        v = verify_witness(gv, sigma, "positive-safe")
        diag["verification"] = v.status
        if not v.verified:
            diag["reason"] = "counting strategy did not verify in the concrete game"
            return QualitativeAnswer(UNKNOWN, None, diag)
    return QualitativeAnswer(WIN, sigma, diag)


def bad_states(game: Game, t: Iterable | None = None, ladder: KLadder | None = None,
               k_cap: int | None = None, budget: int = DEFAULT_NODE_BUDGET,
               verify: bool = True) -> tuple[frozenset[int], frozenset[int], dict]:
    """Q_B for the revealed game, by peeling.

    Starting from every state, repeatedly drop states that cannot reach t
    positively while staying almost surely in the current set. Returns
    (certainly bad, possibly bad, per-state answers); the two sets differ
    only when some check was inconclusive. State ids refer to the
    revealed game when revealing was needed.
    """
    game = normalize(game)
    require_p1_perfect(game)
    r, keys = revealed(game)
    t_r, _ = _lift_sets(game, keys, t, None)
    return _peel(r, t_r, ladder, k_cap, budget, verify)


def _peel(r: Game, t: frozenset[int], ladder, k_cap, budget, verify):
    good = frozenset(range(r.n))
    maybe_good = good
    answers: dict[int, QualitativeAnswer] = {}
    while True:
        drop, drop_maybe = set(), set()
        for q in sorted(good):
            if q in t:
                continue
            ans = _solve_prs(with_init(r, q), t, good, ladder, k_cap, budget, verify, False)
            answers[q] = ans
            if ans.verdict == LOSE:
                drop.add(q)
            elif ans.verdict == UNKNOWN:
                drop_maybe.add(q)
        if not drop and not drop_maybe:
            break
        good = good - drop - drop_maybe
        maybe_good = maybe_good - drop
    all_states = frozenset(range(r.n))
    return all_states - maybe_good, all_states - good, answers


def bad_states_enumerated(game: Game, t: Iterable | None = None,
                          ladder: KLadder | None = None) -> frozenset[int]:
    """Literal subset enumeration of the largest self-sustaining set (small games)."""
    game = normalize(game)
    r, keys = revealed(game)
    t_r, _ = _lift_sets(game, keys, t, None)
    best = frozenset(t_r)
    others = [q for q in range(r.n) if q not in t_r]
    for mask in range(1 << len(others)):
        cand = frozenset(t_r) | {others[i] for i in range(len(others)) if mask >> i & 1}
        ok = all(_solve_prs(with_init(r, q), t_r, cand, ladder, None, DEFAULT_NODE_BUDGET,
                            False, False).verdict == WIN for q in cand if q not in t_r)
        if ok:
            best = best | cand
    return frozenset(range(r.n)) - best


def compose_restart_play(per_state: dict[int, Transducer], n: int,
                         obs_state: Sequence[int] | None = None) -> Transducer:
    """Restart/Play: on restart pick σ_q for the current state q, play it for
    n moves, then restart. Memory: restart, or (q, memory of σ_q, counter)."""
    if n < 1:
        raise ValueError("step budget must be >= 1")
    if not per_state:
        raise ValueError("need at least one per-state strategy")
    first = next(iter(per_state.values()))
    actions, n_obs = first.actions, first.n_obs
    if any(s.actions != actions or s.n_obs != n_obs for s in per_state.values()):
        raise ValueError("per-state strategies must share actions and observations")
    obs_state = list(obs_state) if obs_state is not None else list(range(n_obs))
    keys: list = ["restart"]
    for q in sorted(per_state):
        for m in range(per_state[q].size):
            for c in range(1, n):
                keys.append((q, m, c))
    idx = {k: i for i, k in enumerate(keys)}

    def step(sigma: Transducer, q: int, m: int, c: int, o: int):
        mv = sigma.next[m][o]
        m2 = sigma.update[m][o]
        return mv, (0 if c + 1 >= n else idx[(q, m2, c + 1)])

    rows_n, rows_u = [], []
    for k in keys:
        rn, ru = [], []
        for o in range(n_obs):
            if k == "restart":
                q = obs_state[o]
                sigma = per_state.get(q)
                if sigma is None:
                    rn.append(pure_move(0))
                    ru.append(0)
                    continue
                mv, nxt = step(sigma, q, sigma.m0, 0, o)
            else:
                q, m, c = k
                mv, nxt = step(per_state[q], q, m, c, o)
            rn.append(mv)
            ru.append(nxt)
        rows_n.append(tuple(rn))
        rows_u.append(tuple(ru))
    labels = tuple("restart" if k == "restart" else f"play{k[0]}/m{k[1]}/{k[2]}" for k in keys)
    return Transducer(actions=actions, n_obs=n_obs, m0=0, update=tuple(rows_u),
                      next=tuple(rows_n), labels=labels)


def solve_almost_sure_p1perfect(game: Game, t: Iterable | None = None,
                                ladder: KLadder | None = None, k_cap: int | None = None,
                                budget: int = DEFAULT_NODE_BUDGET,
                                max_steps: int = 64) -> QualitativeAnswer:
    """Almost-sure reachability: win iff the initial state is not bad; the
    witness restarts a positive strategy from the current state every N moves."""
    from .oracle import verify_witness

    game = normalize(game)
    require_p1_perfect(game)
    r, keys = revealed(game)
    was_revealed = keys is not None
    t_r, _ = _lift_sets(game, keys, t, None)
    certain, possible, answers = _peel(r, t_r, ladder, k_cap, budget, True)
    diag = {"backend": "counting", "revealed": was_revealed,
            "k_cap": ladder.cap if ladder else (k_cap or DEFAULT_K_CAP),
            "cap_fired": any(a.diagnostics.get("cap_fired") for a in answers.values()),
            "bad_certain": sorted(r.states[q] for q in certain),
            "bad_possible": sorted(r.states[q] for q in possible),
            "game_states": r.n, "witness_game": r}
    if r.init in certain:
        return QualitativeAnswer(LOSE, None, diag)
    if r.init in possible:
        diag["reason"] = "bad-state computation inconclusive for the initial state"
        return QualitativeAnswer(UNKNOWN, None, diag)
    good = frozenset(range(r.n)) - possible
    per_state = {}
    steps = 1
    for q in sorted(good):
        if q in t_r:
            per_state[q] = _stay(r)
            continue
        ans = answers.get(q)
        if ans is None or not ans.win:
            ans = _solve_prs(with_init(r, q), t_r, good, ladder, k_cap, budget, True, False)
        if not ans.win:
            diag["reason"] = f"no verified positive strategy from {r.states[q]}"
            return QualitativeAnswer(UNKNOWN, None, diag)
        per_state[q] = ans.witness
        steps = max(steps, ans.diagnostics.get("steps", 1))
    obs_state = [next(iter(blk)) for blk in r.obs1]
    gv = replace(r, target=t_r)
    n = steps + 1
    while n <= max_steps:
        sigma = compose_restart_play(per_state, n, obs_state)
        v = verify_witness(gv, sigma, "almost-sure")
        if v.verified:
            diag.update(steps=n, witness_memory=sigma.size, verification=v.status,
                        memory_shape=f"1 + sum|sigma_q| * {n - 1}")
            return QualitativeAnswer(WIN, sigma, diag)
        n *= 2
    diag["reason"] = f"Restart/Play composition did not verify up to {max_steps} steps"
    return QualitativeAnswer(UNKNOWN, None, diag)


def _stay(r: Game) -> Transducer:
    return Transducer(actions=r.actions1, n_obs=len(r.obs1), m0=0,
                      update=(tuple(0 for _ in r.obs1),),
                      next=(tuple(pure_move(0) for _ in r.obs1),))


__all__ = ["OMEGA", "KLadder", "safe_actions", "compute_z", "succ_counting", "abs_counting",
           "build_counting_game", "solve_pos_reach_safe", "bad_states",
           "solve_almost_sure_p1perfect", "compose_restart_play", "revealed", "DEFAULT_K_CAP"]
