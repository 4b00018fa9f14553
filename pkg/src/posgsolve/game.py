"""Finite stochastic games with two observation partitions.

States, actions and observation blocks are dense integer ids with a side
table of display names. Sets of states are handled internally as int
bitmasks (bit q set iff state q is in the set).
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

Dist = tuple[tuple[int, Fraction], ...]


def mask_of(ids: Iterable[int]) -> int:
    m = 0
    for i in ids:
        m |= 1 << i
    return m


def bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def dirac(q: int) -> Dist:
    return ((q, Fraction(1)),)


def make_dist(pairs: Iterable[tuple[int, Fraction | int | str]]) -> Dist:
    """Merge duplicate successors and sort by state id."""
    acc: dict[int, Fraction] = {}
    for q, p in pairs:
        acc[q] = acc.get(q, Fraction(0)) + Fraction(p)
    return tuple(sorted((q, p) for q, p in acc.items() if p != 0))


def support(d: Dist) -> int:
    return mask_of(q for q, _ in d)


@dataclass(frozen=True)
class Game:
    """A stochastic game; delta[q][a][b] is an exact distribution."""

    states: tuple[str, ...]
    init: int
    actions1: tuple[str, ...]
    actions2: tuple[str, ...]
    delta: tuple[tuple[tuple[Dist, ...], ...], ...]
    obs1: tuple[frozenset[int], ...]
    obs2: tuple[frozenset[int], ...]
    target: frozenset[int]
    safe: frozenset[int] | None = None
    obs1_names: tuple[str, ...] | None = field(default=None, compare=False)
    obs2_names: tuple[str, ...] | None = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return len(self.states)

    def state_id(self, name: str | int) -> int:
        if isinstance(name, int):
            if not 0 <= name < self.n:
                raise KeyError(f"unknown state id {name}")
            return name
        try:
            return self.states.index(name)
        except ValueError:
            raise KeyError(f"unknown state {name!r}") from None

    def action1_id(self, name: str | int) -> int:
        if isinstance(name, int):
            if not 0 <= name < len(self.actions1):
                raise KeyError(f"unknown player-1 action id {name}")
            return name
        try:
            return self.actions1.index(name)
        except ValueError:
            raise KeyError(f"unknown player-1 action {name!r}") from None

    def action2_id(self, name: str | int) -> int:
        if isinstance(name, int):
            if not 0 <= name < len(self.actions2):
                raise KeyError(f"unknown player-2 action id {name}")
            return name
        try:
            return self.actions2.index(name)
        except ValueError:
            raise KeyError(f"unknown player-2 action {name!r}") from None

    def mask(self, states: Iterable[str | int]) -> int:
        return mask_of(self.state_id(s) for s in states)

    def names(self, mask: int) -> list[str]:
        return [self.states[q] for q in bits(mask)]

    @cached_property
    def target_mask(self) -> int:
        return mask_of(self.target)

    @cached_property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def obs1_of(self) -> tuple[int, ...]:
        return _block_index(self.obs1, self.n)

    @cached_property
    def obs2_of(self) -> tuple[int, ...]:
        return _block_index(self.obs2, self.n)

    @cached_property
    def obs1_masks(self) -> tuple[int, ...]:
        return tuple(mask_of(b) for b in self.obs1)

    @cached_property
    def obs2_masks(self) -> tuple[int, ...]:
        return tuple(mask_of(b) for b in self.obs2)

    @cached_property
    def succ(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        """succ[q][a][b] = support mask of delta(q,a,b)."""
        return tuple(tuple(tuple(support(d) for d in row) for row in per_q)
                     for per_q in self.delta)

    @cached_property
    def succ_any(self) -> tuple[tuple[int, ...], ...]:
        """succ_any[q][a] = union over b of succ[q][a][b]."""
        out = []
        for per_q in self.succ:
            row = []
            for per_a in per_q:
                m = 0
                for s in per_a:
                    m |= s
                row.append(m)
            out.append(tuple(row))
        return tuple(out)

    @cached_property
    def side(self) -> "SideInfo":
        return SideInfo(
            player1="perfect" if all(len(b) == 1 for b in self.obs1) else "partial",
            player2="perfect" if all(len(b) == 1 for b in self.obs2) else "partial",
        )

    def obs1_label(self, i: int) -> str:
        if self.obs1_names:
            return self.obs1_names[i]
        return "{" + ",".join(self.states[q] for q in sorted(self.obs1[i])) + "}"

    def obs2_label(self, i: int) -> str:
        if self.obs2_names:
            return self.obs2_names[i]
        return "{" + ",".join(self.states[q] for q in sorted(self.obs2[i])) + "}"


@dataclass(frozen=True)
class SideInfo:
    player1: str
    player2: str


def _block_index(blocks: Sequence[frozenset[int]], n: int) -> tuple[int, ...]:
    idx = [-1] * n
    for i, b in enumerate(blocks):
        for q in b:
            if 0 <= q < n and idx[q] == -1:
                idx[q] = i
    return tuple(idx)


def build_game(states: Sequence[str], init: str, actions1: Sequence[str],
               actions2: Sequence[str],
               transitions: dict[tuple[str, str, str], dict[str, Fraction | int | str]],
               obs1: Sequence[Iterable[str]], obs2: Sequence[Iterable[str]],
               target: Iterable[str], safe: Iterable[str] | None = None,
               default: str | None = None) -> Game:
    """Build a game from name-keyed transitions.

    Missing (q,a,b) entries go Dirac to `default` when given, else raise.
    """
    sid = {s: i for i, s in enumerate(states)}
    a1 = {a: i for i, a in enumerate(actions1)}
    a2 = {b: i for i, b in enumerate(actions2)}
    table: list[list[list[Dist | None]]] = [
        [[None] * len(actions2) for _ in actions1] for _ in states]
    for (q, a, b), d in transitions.items():
        table[sid[q]][a1[a]][a2[b]] = make_dist((sid[t], p) for t, p in d.items())
    for q in range(len(states)):
        for a in range(len(actions1)):
            for b in range(len(actions2)):
                if table[q][a][b] is None:
                    if default is None:
                        raise ValueError(
                            f"missing transition {states[q]} {actions1[a]} {actions2[b]}")
                    table[q][a][b] = dirac(sid[default])
    return Game(
        states=tuple(states), init=sid[init], actions1=tuple(actions1),
        actions2=tuple(actions2),
        delta=tuple(tuple(tuple(row) for row in per_q) for per_q in table),  # type: ignore[arg-type]
        obs1=tuple(frozenset(sid[s] for s in blk) for blk in obs1),
        obs2=tuple(frozenset(sid[s] for s in blk) for blk in obs2),
        target=frozenset(sid[s] for s in target),
        safe=None if safe is None else frozenset(sid[s] for s in safe),
    )


def validate(game: Game) -> list[str]:
    """Return a list of human-readable invariant violations (empty if valid)."""
    out: list[str] = []
    n = game.n
    if len(set(game.states)) != n:
        out.append("states: duplicate state names")
    if not 0 <= game.init < n:
        out.append(f"init: id {game.init} out of range")
    if not game.actions1 or not game.actions2:
        out.append("actions: both action alphabets must be nonempty")
    if len(game.delta) != n:
        out.append(f"delta: {len(game.delta)} rows for {n} states")
    for q, per_q in enumerate(game.delta):
        qn = game.states[q] if q < n else str(q)
        if len(per_q) != len(game.actions1):
            out.append(f"delta: state {qn} has {len(per_q)} player-1 rows")
            continue
        for a, per_a in enumerate(per_q):
            if len(per_a) != len(game.actions2):
                out.append(f"delta: ({qn},{game.actions1[a]}) has {len(per_a)} player-2 entries")
                continue
            for b, d in enumerate(per_a):
                where = f"({qn},{game.actions1[a]},{game.actions2[b]})"
                if not d:
                    out.append(f"distribution sum: {where} is empty")
                    continue
                total = Fraction(0)
                for t, p in d:
                    if not 0 <= t < n:
                        out.append(f"delta: {where} targets unknown state id {t}")
                    if p <= 0:
                        out.append(f"distribution sum: {where} has non-positive probability {p}")
                    total += p
                if total != 1:
                    out.append(f"distribution sum: {where} sums to {total}")
    for label, blocks in (("obs1", game.obs1), ("obs2", game.obs2)):
        seen: dict[int, int] = {}
        for i, blk in enumerate(blocks):
            if not blk:
                out.append(f"partition: {label} block {i} is empty")
            for q in blk:
                if not 0 <= q < n:
                    out.append(f"partition: {label} block {i} has unknown state id {q}")
                elif q in seen:
                    out.append(f"partition: {label} blocks {seen[q]} and {i} overlap on "
                               f"{game.states[q]}")
                else:
                    seen[q] = i
        missing = [game.states[q] for q in range(n) if q not in seen]
        if missing:
            out.append(f"partition: {label} does not cover {', '.join(missing)}")
    for q in game.target:
        if not 0 <= q < n:
            out.append(f"target: unknown state id {q}")
    if game.safe is not None:
        extra = [game.states[q] for q in game.target - game.safe if 0 <= q < n]
        if extra:
            out.append(f"safe: target states outside safe set: {', '.join(extra)}")
    return out


def post_set(game: Game, s: Iterable[str | int], a: str | int, b: str | int) -> frozenset[int]:
    ai, bi = game.action1_id(a), game.action2_id(b)
    m = 0
    for q in s:
        m |= game.succ[game.state_id(q)][ai][bi]
    return frozenset(bits(m))


def post_any(game: Game, s: Iterable[str | int], a: str | int) -> frozenset[int]:
    ai = game.action1_id(a)
    m = 0
    for q in s:
        m |= game.succ_any[game.state_id(q)][ai]
    return frozenset(bits(m))


def post_mask(game: Game, s: int, a: int, b: int) -> int:
    m = 0
    for q in bits(s):
        m |= game.succ[q][a][b]
    return m


def post_any_mask(game: Game, s: int, a: int) -> int:
    m = 0
    for q in bits(s):
        m |= game.succ_any[q][a]
    return m


def reachable_mask(game: Game) -> int:
    seen = 1 << game.init
    stack = [game.init]
    while stack:
        q = stack.pop()
        for m in game.succ_any[q]:
            new = m & ~seen
            if new:
                seen |= new
                stack.extend(bits(new))
    return seen


def normalize(game: Game) -> Game:
    """Make every target state absorbing. Unreachable states are kept."""
    rows = []
    changed = False
    for q, per_q in enumerate(game.delta):
        if q in game.target:
            loop = tuple(tuple(dirac(q) for _ in game.actions2) for _ in game.actions1)
            if loop != per_q:
                changed = True
            rows.append(loop)
        else:
            rows.append(per_q)
    if not changed:
        return game
    return replace(game, delta=tuple(rows))


def unreachable_states(game: Game) -> list[str]:
    r = reachable_mask(game)
    return [game.states[q] for q in range(game.n) if not r >> q & 1]


def fold_initial(game: Game, dist: Dist, name: str = "init") -> Game:
    """Add a fresh initial state moving to `dist` under every action pair.

    The fresh state gets its own singleton block for both players: it is only
    ever visited at time 0, so observing it reveals nothing.
    """
    while name in game.states:
        name += "'"
    fresh = game.n
    row = tuple(tuple(dist for _ in game.actions2) for _ in game.actions1)
    return replace(
        game,
        states=game.states + (name,),
        init=fresh,
        delta=game.delta + (row,),
        obs1=game.obs1 + (frozenset([fresh]),),
        obs2=game.obs2 + (frozenset([fresh]),),
        obs1_names=None if game.obs1_names is None else game.obs1_names + (name,),
        obs2_names=None if game.obs2_names is None else game.obs2_names + (name,),
    )


def with_init(game: Game, q: int) -> Game:
    return replace(game, init=q)


def buchi_to_reach(game: Game, buchi: Iterable[str | int], name: str = "q_T") -> Game:
    """Reduce Büchi(buchi) to reachability of a fresh absorbing state.

    Every transition out of a Büchi state sends probability 1/2 to the fresh
    state and keeps 1/2 of the original mass on the original successors.
    """
    bset = {game.state_id(q) for q in buchi}
    while name in game.states:
        name += "'"
    qt = game.n
    half = Fraction(1, 2)
    rows = []
    for q, per_q in enumerate(game.delta):
        if q in bset:
            rows.append(tuple(tuple(make_dist([(qt, half)] + [(t, p * half) for t, p in d])
                                    for d in per_a) for per_a in per_q))
        else:
            rows.append(per_q)
    rows.append(tuple(tuple(dirac(qt) for _ in game.actions2) for _ in game.actions1))
    return Game(
        states=game.states + (name,),
        init=game.init,
        actions1=game.actions1,
        actions2=game.actions2,
        delta=tuple(rows),
        obs1=game.obs1 + (frozenset([qt]),),
        obs2=game.obs2 + (frozenset([qt]),),
        target=frozenset([qt]),
        safe=None,
    )


def restrict_observation(game: Game, player: int) -> Game:
    """Copy of the game where `player` observes states perfectly."""
    single = tuple(frozenset([q]) for q in range(game.n))
    if player == 1:
        return replace(game, obs1=single, obs1_names=None)
    return replace(game, obs2=single, obs2_names=None)


def reveal_p2_actions(game: Game, minimal: bool = True
                      ) -> tuple[Game, tuple[tuple[int, int | None], ...]]:
    """Tag each state with the player-2 action that led into it.

    Player 1 observes tagged states perfectly, so it sees player 2's last
    action; player 2's observation is unchanged. With `minimal`, a step is
    tagged only when the action is neither irrelevant (every b behaves
    alike) nor already readable from the successor (disjoint supports). Only tagged states
    reachable from (init, None) are kept. Returns the game and the
    (state, tag) table.
    """
    keys: list[tuple[int, int | None]] = [(game.init, None)]
    index = {keys[0]: 0}
    rows: list[list[list[Dist]]] = []
    i = 0
    while i < len(keys):
        q, _ = keys[i]
        per_q = []
        for a in range(len(game.actions1)):
            per_a = []
            for b in range(len(game.actions2)):
                out = []
                tag = b if not minimal or _ambiguous(game, q, a) else None
                for t, p in game.delta[q][a][b]:
                    k = (t, tag)
                    if k not in index:
                        index[k] = len(keys)
                        keys.append(k)
                    out.append((index[k], p))
                per_a.append(make_dist(out))
            per_q.append(per_a)
        rows.append(per_q)
        i += 1
    names = []
    for q, tag in keys:
        names.append(game.states[q] if tag is None else f"{game.states[q]}|{game.actions2[tag]}")
    obs2_blocks: dict[int, list[int]] = {}
    for j, (q, _) in enumerate(keys):
        obs2_blocks.setdefault(game.obs2_of[q], []).append(j)
    order = sorted(obs2_blocks)
    g = Game(
        states=tuple(names), init=0, actions1=game.actions1, actions2=game.actions2,
        delta=tuple(tuple(tuple(r) for r in per_q) for per_q in rows),
        obs1=tuple(frozenset([j]) for j in range(len(keys))),
        obs2=tuple(frozenset(obs2_blocks[o]) for o in order),
        target=frozenset(j for j, (q, _) in enumerate(keys) if q in game.target),
        safe=None if game.safe is None else frozenset(
            j for j, (q, _) in enumerate(keys) if q in game.safe),
        obs2_names=None if game.obs2_names is None else tuple(game.obs2_names[o] for o in order),
    )
    return g, tuple(keys)


def _ambiguous(game: Game, q: int, a: int) -> bool:
    if len(set(game.delta[q][a])) == 1:
        return False
    ms = game.succ[q][a]
    return any(ms[i] & ms[j] for i in range(len(ms)) for j in range(i + 1, len(ms)))


def p2_actions_revealed(game: Game) -> bool:
    """True when knowing player 2's action never matters beyond the successor.

    For every (q,a), either all player-2 actions act identically or they
    lead to pairwise disjoint supports.
    """
    return not any(_ambiguous(game, q, a)
                   for q in range(game.n) for a in range(len(game.actions1)))
