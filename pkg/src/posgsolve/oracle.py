"""Ground truth by exhaustive means: product chains, exact probabilities,
belief-subset checks for partially informed adversaries, witness
verification and brute-force strategy enumeration.

Everything here works on supports except `exact_prob`, which solves the
hitting-probability system over the rationals.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable

from .answer import LOSE, UNKNOWN, WIN, BudgetExceeded, QualitativeAnswer
from .game import Dist, Game, bits, make_dist, normalize
from .transducer import Transducer, pure_move

VERIFY_MODES = ("almost-sure", "positive", "positive-safe")
ALMOST, POSITIVE_ONLY, ZERO = "almost-sure", "positive-only", "zero"
DEFAULT_BELIEF_BUDGET = 200_000


@dataclass
class Mdp:
    """A finite graph where the adversary (player 2) picks an action per node.

    With both strategies fixed there is a single action and the structure is a
    Markov chain. `obs` is the adversary's observation of each node; when
    `adversary_perfect` holds the adversary sees nodes exactly.
    """

    labels: list[tuple]
    start: int
    trans: list[list[Dist]]
    obs: list[int]
    target: frozenset[int]
    adversary_perfect: bool
    fixed: bool = False
    _succ: list[list[int]] | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def succ(self) -> list[list[int]]:
        if self._succ is None:
            self._succ = [[_mask(d) for d in row] for row in self.trans]
        return self._succ

    @property
    def target_mask(self) -> int:
        m = 0
        for v in self.target:
            m |= 1 << v
        return m


def _mask(d: Dist) -> int:
    m = 0
    for v, _ in d:
        m |= 1 << v
    return m


ProductChain = Mdp


def _check_alphabet(game: Game, t: Transducer, player: int) -> None:
    n_obs = len(game.obs1 if player == 1 else game.obs2)
    n_act = len(game.actions1 if player == 1 else game.actions2)
    if t.n_obs != n_obs:
        raise ValueError(f"player-{player} transducer reads {t.n_obs} observations, "
                         f"game has {n_obs}")
    if len(t.actions) != n_act:
        raise ValueError(f"player-{player} transducer has {len(t.actions)} actions, "
                         f"game has {n_act}")


def product(game: Game, sigma: Transducer, pi: Transducer | None = None) -> Mdp:
    """Synchronous product of the (normalized) game with sigma, and pi if given.

    Nodes are (q, m1) or (q, m1, m2) where m is the memory before reading the
    observation of q.
    """
    game = normalize(game)
    _check_alphabet(game, sigma, 1)
    if pi is not None:
        _check_alphabet(game, pi, 2)
    start = (game.init, sigma.m0) if pi is None else (game.init, sigma.m0, pi.m0)
    index = {start: 0}
    labels = [start]
    trans: list[list[Dist]] = []
    i = 0
    while i < len(labels):
        node = labels[i]
        q, m1 = node[0], node[1]
        o1 = game.obs1_of[q]
        mv1 = sigma.next[m1][o1]
        n1 = sigma.update[m1][o1]
        if pi is None:
            row = []
            for b in range(len(game.actions2)):
                acc = []
                for a, pa in mv1:
                    for t, p in game.delta[q][a][b]:
                        acc.append(((t, n1), pa * p))
                row.append(acc)
        else:
            m2 = node[2]
            o2 = game.obs2_of[q]
            mv2 = pi.next[m2][o2]
            n2 = pi.update[m2][o2]
            acc = []
            for a, pa in mv1:
                for b, pb in mv2:
                    for t, p in game.delta[q][a][b]:
                        acc.append(((t, n1, n2), pa * pb * p))
            row = [acc]
        out = []
        for acc in row:
            pairs = []
            for key, p in acc:
                if key not in index:
                    index[key] = len(labels)
                    labels.append(key)
                pairs.append((index[key], p))
            out.append(make_dist(pairs))
        trans.append(out)
        i += 1
    perfect = game.side.player2 == "perfect"
    mdp = Mdp(
        labels=labels, start=0, trans=trans,
        obs=list(range(len(labels))) if (perfect or pi is not None)
        else [game.obs2_of[v[0]] for v in labels],
        target=frozenset(j for j, v in enumerate(labels) if v[0] in game.target),
        adversary_perfect=perfect or pi is not None, fixed=pi is not None)
    bound = game.n * sigma.size * (pi.size if pi is not None else 1)
    assert mdp.n <= bound, "product exceeds |Q|*|Mem| bound"
    return mdp


# ---------------------------------------------------------------- perfect adversary

def sure_avoid(mdp: Mdp) -> tuple[int, dict[int, int]]:
    """Nodes from which the adversary surely avoids the target (gfp), with choices."""
    tm = mdp.target_mask
    s = ((1 << mdp.n) - 1) & ~tm
    while True:
        ns = 0
        for v in bits(s):
            if any(m & ~s == 0 for m in mdp.succ[v]):
                ns |= 1 << v
        if ns == s:
            break
        s = ns
    choice = {}
    for v in bits(s):
        for b, m in enumerate(mdp.succ[v]):
            if m & ~s == 0:
                choice[v] = b
                break
    return s, choice


def positive_avoid(mdp: Mdp) -> tuple[int, dict[int, int]]:
    """Nodes from which the adversary avoids the target with positive probability."""
    s, choice = sure_avoid(mdp)
    tm = mdp.target_mask
    r = s
    changed = True
    while changed:
        changed = False
        add = 0
        for v in range(mdp.n):
            if r >> v & 1 or tm >> v & 1:
                continue
            for b, m in enumerate(mdp.succ[v]):
                if m & r:
                    choice[v] = b
                    add |= 1 << v
                    break
        if add:
            r |= add
            changed = True
    return r, choice


# ---------------------------------------------------------------- partial adversary

class BeliefSpace:
    """Belief subsets of an Mdp for an adversary observing `mdp.obs`."""

    def __init__(self, mdp: Mdp, budget: int = DEFAULT_BELIEF_BUDGET):
        self.mdp = mdp
        self.budget = budget
        om: dict[int, int] = {}
        for v, o in enumerate(mdp.obs):
            om[o] = om.get(o, 0) | (1 << v)
        self.obs_masks = list(om.values())
        self.n_act = len(mdp.trans[0]) if mdp.trans else 1
        self.children: dict[int, list[list[int]]] = {}

    def post(self, belief: int, b: int) -> int:
        m = 0
        succ = self.mdp.succ
        for v in bits(belief):
            m |= succ[v][b]
        return m

    def split(self, m: int) -> list[int]:
        return [m & om for om in self.obs_masks if m & om]

    def explore(self, roots: Iterable[int]) -> None:
        stack = [r for r in roots if r not in self.children]
        while stack:
            bel = stack.pop()
            if bel in self.children:
                continue
            if len(self.children) >= self.budget:
                raise BudgetExceeded(f"belief space exceeds {self.budget} subsets")
            kids = [self.split(self.post(bel, b)) for b in range(self.n_act)]
            self.children[bel] = kids
            for ks in kids:
                for k in ks:
                    if k not in self.children:
                        stack.append(k)

    def sure_safe(self) -> tuple[set[int], dict[int, int]]:
        """Explored beliefs from which the adversary surely avoids the target."""
        tm = self.mdp.target_mask
        safe = {bel for bel in self.children if not bel & tm}
        while True:
            drop = [bel for bel in safe
                    if not any(all(k in safe for k in ks) for ks in self.children[bel])]
            if not drop:
                break
            safe.difference_update(drop)
        choice = {}
        for bel in safe:
            for b, ks in enumerate(self.children[bel]):
                if all(k in safe for k in ks):
                    choice[bel] = b
                    break
        return safe, choice


def _avoid_reachable(mdp: Mdp) -> tuple[list[int], dict[int, tuple[int, int]]]:
    """Non-target nodes reachable from start through non-target nodes, with
    BFS parents (parent node, adversary action)."""
    tm = mdp.target_mask
    if tm >> mdp.start & 1:
        return [], {}
    parent: dict[int, tuple[int, int]] = {mdp.start: (-1, -1)}
    order = [mdp.start]
    i = 0
    while i < len(order):
        v = order[i]
        for b, m in enumerate(mdp.succ[v]):
            for w in bits(m & ~tm):
                if w not in parent:
                    parent[w] = (v, b)
                    order.append(w)
        i += 1
    return order, parent


@dataclass
class ReachAnalysis:
    result: str
    counter: Any = None


def qualitative_reach(mdp: Mdp, budget: int = DEFAULT_BELIEF_BUDGET) -> str:
    """almost-sure / positive-only / zero, quantified over all adversaries."""
    return _analyse(mdp, budget).result


def _analyse(mdp: Mdp, budget: int, want: str = "both") -> ReachAnalysis:
    if mdp.adversary_perfect:
        s, sc = sure_avoid(mdp)
        if s >> mdp.start & 1:
            return ReachAnalysis(ZERO, ("perfect", s, sc))
        if want == "positive":
            return ReachAnalysis(POSITIVE_ONLY)
        r, rc = positive_avoid(mdp)
        if r >> mdp.start & 1:
            return ReachAnalysis(POSITIVE_ONLY, ("perfect", r, rc))
        return ReachAnalysis(ALMOST)
    space = BeliefSpace(mdp, budget)
    start = 1 << mdp.start
    if want == "positive":
        space.explore([start])
        safe, ch = space.sure_safe()
        if start in safe:
            return ReachAnalysis(ZERO, ("belief", space, safe, ch, [], None))
        return ReachAnalysis(POSITIVE_ONLY)
    order, parent = _avoid_reachable(mdp)
    space.explore([start] + [1 << v for v in order])
    safe, ch = space.sure_safe()
    if start in safe:
        return ReachAnalysis(ZERO, ("belief", space, safe, ch, [], None))
    for v in order:
        if (1 << v) in safe:
            path = []
            w = v
            while parent[w][0] != -1:
                path.append(parent[w])
                w = parent[w][0]
            path.reverse()
            return ReachAnalysis(POSITIVE_ONLY, ("belief", space, safe, ch, path, v))
    return ReachAnalysis(ALMOST)


def pomdp_almost_sure_safety(mdp: Mdp, safe_set: Iterable[int],
                             budget: int = DEFAULT_BELIEF_BUDGET) -> bool:
    """Can the (partially observing) controller keep every play inside safe_set
    with probability 1? For safety this equals sure safety on belief subsets."""
    safe_mask = 0
    for v in safe_set:
        safe_mask |= 1 << v
    bad = frozenset(v for v in range(mdp.n) if not safe_mask >> v & 1)
    alt = Mdp(mdp.labels, mdp.start, mdp.trans, mdp.obs, bad, mdp.adversary_perfect, mdp.fixed,
              mdp._succ)
    if mdp.adversary_perfect:
        s, _ = sure_avoid(alt)
        return bool(s >> mdp.start & 1)
    space = BeliefSpace(alt, budget)
    space.explore([1 << mdp.start])
    safe, _ = space.sure_safe()
    return (1 << mdp.start) in safe


def exact_prob(chain: Mdp, target: Iterable[int] | None = None) -> Fraction:
    """Exact probability of reaching the target from the start of a chain."""
    if not chain.fixed and any(len(r) != 1 for r in chain.trans):
        raise ValueError("exact_prob needs a Markov chain (both strategies fixed)")
    tgt = chain.target if target is None else frozenset(target)
    n = chain.n
    preds: list[list[int]] = [[] for _ in range(n)]
    for v in range(n):
        for w, _ in chain.trans[v][0]:
            preds[w].append(v)
    can = set(tgt)
    stack = list(tgt)
    while stack:
        w = stack.pop()
        for v in preds[w]:
            if v not in can:
                can.add(v)
                stack.append(v)
    if chain.start in tgt:
        return Fraction(1)
    if chain.start not in can:
        return Fraction(0)
    unknown = sorted(v for v in can if v not in tgt)
    col = {v: i for i, v in enumerate(unknown)}
    k = len(unknown)
    # (I - P) x = b
    rows = []
    for v in unknown:
        row = [Fraction(0)] * (k + 1)
        row[col[v]] += 1
        for w, p in chain.trans[v][0]:
            if w in tgt:
                row[k] += p
            elif w in col:
                row[col[w]] -= p
        rows.append(row)
    x = _gauss(rows, k)
    return x[col[chain.start]]


def _gauss(rows: list[list[Fraction]], k: int) -> list[Fraction]:
    for c in range(k):
        piv = next(r for r in range(c, k) if rows[r][c] != 0)
        rows[c], rows[piv] = rows[piv], rows[c]
        pr = rows[c]
        inv = 1 / pr[c]
        for j in range(c, k + 1):
            pr[j] *= inv
        for r in range(k):
            if r != c and rows[r][c] != 0:
                f = rows[r][c]
                rr = rows[r]
                for j in range(c, k + 1):
                    if pr[j]:
                        rr[j] -= f * pr[j]
    return [rows[i][k] for i in range(k)]


# ---------------------------------------------------------------- counter-strategies

def _counter_perfect(game: Game, sigma: Transducer, mdp: Mdp, choice: dict[int, int]) -> Transducer:
    """Player-2 transducer whose memory mirrors sigma's memory."""
    game = normalize(game)
    node_of = {lab: i for i, lab in enumerate(mdp.labels)}
    nxt, upd = [], []
    for m in range(sigma.size):
        rn, ru = [], []
        for o2, blk in enumerate(game.obs2):
            (q,) = tuple(blk)
            v = node_of.get((q, m))
            rn.append(pure_move(choice.get(v, 0) if v is not None else 0))
            ru.append(sigma.update[m][game.obs1_of[q]])
        nxt.append(tuple(rn))
        upd.append(tuple(ru))
    return Transducer(actions=game.actions2, n_obs=len(game.obs2), m0=sigma.m0,
                      update=tuple(upd), next=tuple(nxt))


def _counter_partial(game: Game, mdp: Mdp, space: BeliefSpace, choice: dict[int, int],
                     path: list[tuple[int, int]], v_end: int | None) -> Transducer:
    """Follow `path` (node, action) pairs to v_end, then play the sure-safe
    belief strategy from {v_end}; with an empty path start from {start}."""
    game = normalize(game)
    n_obs = len(game.obs2)
    obs_nodes = [0] * n_obs
    for v, lab in enumerate(mdp.labels):
        obs_nodes[game.obs2_of[lab[0]]] |= 1 << v
    keys: list[Any] = []
    index: dict[Any, int] = {}

    def mem(key):
        if key not in index:
            index[key] = len(keys)
            keys.append(key)
        return index[key]

    first = ("path", 0) if path else ("pred", 1 << (v_end if v_end is not None else mdp.start))
    mem(first)
    dead = mem(("dead",))
    nxt: dict[int, list] = {}
    upd: dict[int, list] = {}
    i = 0
    while i < len(keys):
        key = keys[i]
        rn, ru = [], []
        for o in range(n_obs):
            if key[0] == "dead":
                rn.append(pure_move(0))
                ru.append(dead)
            elif key[0] == "path":
                j = key[1]
                node, b = path[j]
                if not obs_nodes[o] >> node & 1:
                    rn.append(pure_move(0))
                    ru.append(dead)
                else:
                    rn.append(pure_move(b))
                    ru.append(mem(("path", j + 1)) if j + 1 < len(path)
                              else mem(("pred", 1 << v_end)))  # type: ignore[operator]
            else:
                cur = key[1] & obs_nodes[o]
                if not cur or cur not in choice:
                    rn.append(pure_move(0))
                    ru.append(dead)
                else:
                    b = choice[cur]
                    rn.append(pure_move(b))
                    ru.append(mem(("pred", space.post(cur, b))))
        nxt[i], upd[i] = rn, ru
        i += 1
    return Transducer(actions=game.actions2, n_obs=n_obs, m0=0,
                      update=tuple(tuple(upd[i]) for i in range(len(keys))),
                      next=tuple(tuple(nxt[i]) for i in range(len(keys))))


# ---------------------------------------------------------------- verification

@dataclass
class Verdict:
    status: str  # verified | refuted | inconclusive
    counter: Transducer | None = None
    exact: bool = True
    detail: str = ""
    p2_bound: int | None = None

    @property
    def verified(self) -> bool:
        return self.status == "verified"


def verify_witness(game: Game, sigma: Transducer, mode: str, p2_mem: int = 2,
                   budget: int = DEFAULT_BELIEF_BUDGET) -> Verdict:
    """Check sigma against every player-2 strategy.

    Exact when player 2 is perfect (MDP analysis) and, for partial player 2,
    whenever the belief-subset construction fits in `budget`; otherwise
    player-2 transducers with at most p2_mem memory are enumerated.
    Mode positive-safe also requires every reachable state to lie in game.safe.
    """
    if mode not in VERIFY_MODES:
        raise ValueError(f"mode must be one of {', '.join(VERIFY_MODES)}")
    game = normalize(game)
    mdp = product(game, sigma)
    if mode == "positive-safe":
        if game.safe is None:
            raise ValueError("positive-safe verification needs a safe set")
        bad = _unsafe_path(game, mdp)
        if bad is not None:
            path, v = bad
            counter = _path_counter(game, mdp, path)
            return Verdict("refuted", counter, detail=f"reaches unsafe state "
                           f"{game.states[mdp.labels[v][0]]}")
    want = "almost" if mode == "almost-sure" else "positive"
    try:
        res = _analyse(mdp, budget, want)
    except BudgetExceeded as e:
        return _bounded_verify(game, sigma, mode, p2_mem, str(e))
    ok = res.result == ALMOST if mode == "almost-sure" else res.result != ZERO
    if ok:
        return Verdict("verified")
    return Verdict("refuted", _counter_from(game, sigma, mdp, res),
                   detail=f"adversary achieves {res.result}")


def _counter_from(game, sigma, mdp, res: ReachAnalysis) -> Transducer:
    info = res.counter
    if info[0] == "perfect":
        return _counter_perfect(game, sigma, mdp, info[2])
    _, space, _safe, ch, path, v_end = info
    return _counter_partial(game, mdp, space, ch, path, v_end)


def _unsafe_path(game: Game, mdp: Mdp):
    safe = game.safe
    parent = {mdp.start: (-1, -1)}
    order = [mdp.start]
    i = 0
    while i < len(order):
        v = order[i]
        if mdp.labels[v][0] not in safe:  # type: ignore[operator]
            path = []
            w = v
            while parent[w][0] != -1:
                path.append(parent[w])
                w = parent[w][0]
            path.reverse()
            return path, v
        for b, m in enumerate(mdp.succ[v]):
            for w in bits(m):
                if w not in parent:
                    parent[w] = (v, b)
                    order.append(w)
        i += 1
    return None


def _path_counter(game: Game, mdp: Mdp, path) -> Transducer:
    """Player-2 transducer that plays along `path` and then anything."""
    n_obs = len(game.obs2)
    k = len(path)
    nxt, upd = [], []
    for j in range(k + 1):
        if j < k:
            node, b = path[j]
            o_ok = game.obs2_of[mdp.labels[node][0]]
            nxt.append(tuple(pure_move(b if o == o_ok else 0) for o in range(n_obs)))
            upd.append(tuple(j + 1 if o == o_ok else k for o in range(n_obs)))
        else:
            nxt.append(tuple(pure_move(0) for _ in range(n_obs)))
            upd.append(tuple(k for _ in range(n_obs)))
    return Transducer(actions=game.actions2, n_obs=n_obs, m0=0, update=tuple(upd),
                      next=tuple(nxt))


def enumerate_transducers(actions: tuple[str, ...], n_obs: int, k: int):
    """All pure transducers with exactly k memory values (unreduced)."""
    import itertools
    cells = [(m, o) for m in range(k) for o in range(n_obs)]
    for acts in itertools.product(range(len(actions)), repeat=len(cells)):
        for ups in itertools.product(range(k), repeat=len(cells)):
            nxt = [[None] * n_obs for _ in range(k)]
            upd = [[0] * n_obs for _ in range(k)]
            for (m, o), a, u in zip(cells, acts, ups):
                nxt[m][o] = pure_move(a)
                upd[m][o] = u
            yield Transducer(actions=actions, n_obs=n_obs, m0=0,
                             update=tuple(tuple(r) for r in upd),
                             next=tuple(tuple(r) for r in nxt))


def _bounded_verify(game: Game, sigma: Transducer, mode: str, p2_mem: int, why: str) -> Verdict:
    for k in range(1, p2_mem + 1):
        for pi in enumerate_transducers(game.actions2, len(game.obs2), k):
            chain = product(game, sigma, pi)
            r = qualitative_reach(chain)
            if (mode == "almost-sure" and r != ALMOST) or (mode != "almost-sure" and r == ZERO):
                return Verdict("refuted", pi, exact=False, p2_bound=p2_mem,
                               detail=f"bounded enumeration ({why})")
    return Verdict("inconclusive", exact=False, p2_bound=p2_mem,
                   detail=f"no counter-strategy with memory <= {p2_mem} ({why})")


# ---------------------------------------------------------------- brute force

def _hopeless(game: Game, mode: str) -> int:
    """States player 1 loses even when it observes the state perfectly.

    Player 1 still picks its action without seeing player 2's, and is pure.
    Sound to treat as lost only when player 2 observes states perfectly.
    """
    tm = game.target_mask
    na, nb = len(game.actions1), len(game.actions2)
    succ = game.succ

    def reach_within(z: int) -> int:
        x = tm
        while True:
            add = 0
            for q in bits(z & ~x):
                for a in range(na):
                    if all(succ[q][a][b] & ~z == 0 and succ[q][a][b] & x for b in range(nb)):
                        add |= 1 << q
                        break
            if not add:
                return x
            x |= add

    if mode == "positive":
        return game.full_mask & ~reach_within(game.full_mask)
    z = game.full_mask
    while True:
        nz = reach_within(z)
        if nz == z:
            return game.full_mask & ~z
        z = nz


def _partial_product(game: Game, table: dict[tuple[int, int], tuple[int, int]], m0: int,
                     lost: int, perfect2: bool):
    """Product with a partially defined pure transducer.

    Nodes whose (memory, observation) cell is undefined become absorbing
    frontier nodes. Returns (optimistic mdp, frontier cells in BFS order);
    in the optimistic mdp frontier nodes count as targets unless their state
    is in `lost`.
    """
    start = (game.init, m0)
    index = {start: 0}
    labels = [start]
    trans: list[list[Dist]] = []
    frontier: list[tuple[int, int]] = []
    fset = set()
    tgt = []
    nb = len(game.actions2)
    i = 0
    while i < len(labels):
        q, m = labels[i]
        if q in game.target:
            tgt.append(i)
            trans.append([((i, Fraction(1)),)] * nb)
            i += 1
            continue
        cell = (m, game.obs1_of[q])
        if cell not in table:
            if cell not in fset:
                fset.add(cell)
                frontier.append(cell)
            if not lost >> q & 1:
                tgt.append(i)
            trans.append([((i, Fraction(1)),)] * nb)
            i += 1
            continue
        a, m2 = table[cell]
        row = []
        for b in range(nb):
            pairs = []
            for t, p in game.delta[q][a][b]:
                key = (t, m2)
                if key not in index:
                    index[key] = len(labels)
                    labels.append(key)
                pairs.append((index[key], p))
            row.append(tuple(pairs))
        trans.append(row)
        i += 1
    obs = list(range(len(labels))) if perfect2 else [game.obs2_of[v[0]] for v in labels]
    mdp = Mdp(labels=labels, start=0, trans=trans, obs=obs, target=frozenset(tgt),
              adversary_perfect=perfect2)
    return mdp, frontier


def _table_transducer(game: Game, table, used: int) -> Transducer:
    n_obs = len(game.obs1)
    nxt, upd = [], []
    for m in range(max(used, 1)):
        rn, ru = [], []
        for o in range(n_obs):
            a, m2 = table.get((m, o), (0, m))
            rn.append(pure_move(a))
            ru.append(m2)
        nxt.append(tuple(rn))
        upd.append(tuple(ru))
    return Transducer(actions=game.actions1, n_obs=n_obs, m0=0, update=tuple(upd),
                      next=tuple(nxt))


class _Search:
    def __init__(self, game: Game, mode: str, k: int, budget: int, belief_budget: int):
        self.game = game
        self.mode = mode
        self.k = k
        self.budget = budget
        self.belief_budget = belief_budget
        self.nodes = 0
        self.perfect2 = game.side.player2 == "perfect"
        self.lost = _hopeless(game, mode) if self.perfect2 else 0
        self.want = "almost" if mode == "almost-sure" else "positive"

    def ok(self, mdp: Mdp) -> bool:
        r = _analyse(mdp, self.belief_budget, self.want).result
        return r == ALMOST if self.mode == "almost-sure" else r != ZERO

    def run(self, table: dict, used: int):
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(f"more than {self.budget} search nodes")
        mdp, frontier = _partial_product(self.game, table, 0, self.lost, self.perfect2)
        if not self.ok(mdp):
            return None
        if not frontier:
            return table, used
        cell = frontier[0]
        for a in range(len(self.game.actions1)):
            for m2 in range(min(used + 1, self.k)):
                table[cell] = (a, m2)
                found = self.run(table, max(used, m2 + 1))
                if found is not None:
                    return found
                del table[cell]
        return None


def brute_force_decide(game: Game, mode: str, cls: str = "pure", p1_mem: int = 1,
                       p2_mem: int = 1, budget: int = 200_000,
                       belief_budget: int = DEFAULT_BELIEF_BUDGET) -> QualitativeAnswer:
    """Search pure player-1 transducers with at most p1_mem memory values.

    Transducers are built lazily: a (memory, observation) cell gets an action
    and a successor memory only when the product reaches it, and memory values
    are numbered in order of first use. A partial transducer is pruned when
    player 2 wins even if every undefined cell counted as a win for player 1.
    Player 2 is quantified exactly (MDP or belief subsets), so p2_mem only
    labels the answer. For cls rand-invisible the search runs on the
    subset-action game and the witness is mapped back.
    """
    if mode not in ("almost-sure", "positive"):
        raise ValueError("mode must be almost-sure or positive")
    if p1_mem < 1 or p2_mem < 1:
        raise ValueError("memory bounds must be >= 1")
    src = normalize(game)
    cert = None
    if cls == "rand-invisible":
        from .reductions import rand_to_pure
        src, cert = rand_to_pure(src)
    elif cls != "pure":
        raise ValueError("class must be pure or rand-invisible")
    diag: dict[str, Any] = {"p1_mem_bound": p1_mem, "p2_mem_bound": p2_mem, "class": cls,
                            "adversary": "exact"}
    # deepen the memory bound so small witnesses are found before wide searches
    nodes = 0
    found = None
    k = 1
    while True:
        s = _Search(src, mode, k, budget - nodes, belief_budget)
        try:
            found = s.run({}, 1)
        except BudgetExceeded as e:
            diag.update(search_nodes=nodes + s.nodes, reason=str(e))
            return QualitativeAnswer(UNKNOWN, None, diag)
        nodes += s.nodes
        if found is not None or k == p1_mem:
            break
        k = min(p1_mem, k * 2)
    diag["search_nodes"] = nodes
    if found is None:
        return QualitativeAnswer(LOSE, None, diag)
    table, used = found
    sigma = _table_transducer(src, table, used)
    if cert is not None:
        from .reductions import transfer_strategy
        sigma = transfer_strategy(cert, sigma)
    diag["memory"] = sigma.minimized().size
    return QualitativeAnswer(WIN, sigma, diag)


def minimal_memory(game: Game, mode: str, max_mem: int, cls: str = "pure",
                   budget: int = 200_000) -> tuple[int | None, QualitativeAnswer]:
    """Least k <= max_mem with a winning k-memory transducer (None if none/unknown)."""
    last = None
    for k in range(1, max_mem + 1):
        ans = brute_force_decide(game, mode, cls, p1_mem=k, budget=budget)
        last = ans
        if ans.verdict == WIN:
            return k, ans
        if ans.verdict == UNKNOWN:
            return None, ans
    return None, last  # type: ignore[return-value]
