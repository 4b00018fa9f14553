"""Perfect-information turn-based arenas and their sure-winning solvers.

Vertices are indices 0..n-1; `names` keeps display labels. Each vertex is
owned by player 1 or 2 and has a nonempty list of (label, successor)
edges. Labels must be mutually comparable; strategies pick the least
label among equally good edges.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, Iterator, Sequence

KINDS = ("reach", "safety", "buchi")


class ArenaError(ValueError):
    pass


@dataclass
class ArenaGame:
    names: list[Hashable]
    owner: list[int]
    edges: list[list[tuple[Any, int]]]
    goal: frozenset[int]
    kind: str = "reach"
    _preds: list[list[int]] | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        n = len(self.names)
        if len(self.owner) != n or len(self.edges) != n:
            raise ArenaError("names, owner and edges must have equal length")
        if self.kind not in KINDS:
            raise ArenaError(f"unknown objective kind {self.kind!r}")
        for v in range(n):
            if self.owner[v] not in (1, 2):
                raise ArenaError(f"vertex {self.names[v]!r}: owner must be 1 or 2")
            if not self.edges[v]:
                raise ArenaError(f"vertex {self.names[v]!r} is a dead end")
            for _, w in self.edges[v]:
                if not 0 <= w < n:
                    raise ArenaError(f"vertex {self.names[v]!r}: successor {w} out of range")
        if any(not 0 <= g < n for g in self.goal):
            raise ArenaError("goal contains unknown vertices")

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def preds(self) -> list[list[int]]:
        if self._preds is None:
            p: list[list[int]] = [[] for _ in range(self.n)]
            for v, es in enumerate(self.edges):
                for _, w in es:
                    p[w].append(v)
            self._preds = p
        return self._preds

    def with_kind(self, kind: str, goal: Iterable[int] | None = None) -> "ArenaGame":
        return ArenaGame(self.names, self.owner, self.edges,
                         self.goal if goal is None else frozenset(goal), kind, self._preds)


@dataclass
class Solution:
    win: frozenset[int]
    strategy: dict[int, Any]
    iterations: int

    def __iter__(self) -> Iterator:
        yield self.win
        yield self.strategy


def arena_from_dict(owner: dict[Hashable, int], edges: dict[Hashable, Sequence[tuple[Any, Hashable]]],
                    goal: Iterable[Hashable], kind: str = "reach") -> ArenaGame:
    names = list(owner)
    idx = {v: i for i, v in enumerate(names)}
    return ArenaGame(
        names=names, owner=[owner[v] for v in names],
        edges=[[(lab, idx[w]) for lab, w in edges[v]] for v in names],
        goal=frozenset(idx[g] for g in goal), kind=kind)


def attractor(arena: ArenaGame, target: Iterable[int], player: int = 1,
              within: set[int] | None = None) -> tuple[dict[int, int], int]:
    """Vertices from which `player` forces a visit to `target`, with ranks.

    When `within` is given, only vertices in it are considered and edges
    leaving it count as unavailable to the attracting player and as escapes
    for the opponent.
    """
    rank: dict[int, int] = {}
    q: deque[int] = deque()
    for t in target:
        if within is None or t in within:
            rank[t] = 0
            q.append(t)
    count = [0] * arena.n
    for v in range(arena.n):
        if arena.owner[v] != player:
            count[v] = len(arena.edges[v])
    preds = arena.preds
    depth = 0
    while q:
        w = q.popleft()
        r = rank[w]
        for v in preds[w]:
            if v in rank or (within is not None and v not in within):
                continue
            if arena.owner[v] == player:
                rank[v] = r + 1
                depth = max(depth, r + 1)
                q.append(v)
            else:
                count[v] -= 1
                if count[v] == 0:
                    if within is not None and any(x not in within for _, x in arena.edges[v]):
                        continue
                    rank[v] = r + 1
                    depth = max(depth, r + 1)
                    q.append(v)
    return rank, depth


def _least(edges, ok) -> Any:
    best = None
    for lab, w in edges:
        if ok(w) and (best is None or lab < best):
            best = lab
    return best


def solve_reach(arena: ArenaGame, player: int = 1) -> Solution:
    rank, depth = attractor(arena, arena.goal, player)
    strat = {}
    for v, r in rank.items():
        if arena.owner[v] != player:
            continue
        if r == 0:
            strat[v] = _least(arena.edges[v], lambda w: True)
        else:
            strat[v] = _least(arena.edges[v], lambda w: rank.get(w, r) < r)
    return Solution(frozenset(rank), strat, depth)


def solve_safety(arena: ArenaGame, player: int = 1) -> Solution:
    """Greatest set inside goal that `player` can stay in forever."""
    bad = [v for v in range(arena.n) if v not in arena.goal]
    rank, depth = attractor(arena, bad, 3 - player)
    win = frozenset(v for v in range(arena.n) if v not in rank)
    strat = {v: _least(arena.edges[v], lambda w: w in win)
             for v in win if arena.owner[v] == player}
    return Solution(win, strat, depth)


def _cpre_ok(arena: ArenaGame, v: int, into: frozenset[int] | set[int], player: int) -> bool:
    if arena.owner[v] == player:
        return any(w in into for _, w in arena.edges[v])
    return all(w in into for _, w in arena.edges[v])


def solve_buchi(arena: ArenaGame, player: int = 1) -> Solution:
    """Nested fixpoint nu Z. mu Y. (goal & Cpre(Z)) | Cpre(Y)."""
    z = frozenset(range(arena.n))
    iterations = 0
    while True:
        iterations += 1
        base = [v for v in arena.goal if _cpre_ok(arena, v, z, player)]
        rank, depth = attractor(arena, base, player)
        iterations += depth
        y = frozenset(rank)
        if y == z:
            break
        z = y
    strat = {}
    for v in z:
        if arena.owner[v] != player:
            continue
        r = rank[v]
        if r == 0:
            strat[v] = _least(arena.edges[v], lambda w: w in z)
        else:
            strat[v] = _least(arena.edges[v], lambda w: rank.get(w, r) < r)
    return Solution(z, strat, iterations)


def solve_cobuchi(arena: ArenaGame, player: int = 1) -> Solution:
    """Eventually-always inside goal: mu X. nu Y. (goal & Cpre(Y)) | Cpre(X).

    Plain fixpoint iteration, independent of the attractor code, so it can
    cross-check solve_buchi by duality. No strategy is extracted.
    """
    allv = frozenset(range(arena.n))
    x: frozenset[int] = frozenset()
    iterations = 0
    while True:
        y = allv
        while True:
            iterations += 1
            ny = frozenset(v for v in allv
                           if (v in arena.goal and _cpre_ok(arena, v, y, player))
                           or _cpre_ok(arena, v, x, player))
            if ny == y:
                break
            y = ny
        if y == x:
            break
        x = y
    return Solution(x, {}, iterations)


def solve(arena: ArenaGame, player: int = 1) -> Solution:
    return {"reach": solve_reach, "safety": solve_safety, "buchi": solve_buchi}[arena.kind](
        arena, player)


def check_strategy(arena: ArenaGame, sol: Solution, player: int = 1) -> bool:
    """Graph check: fixing `player`'s memoryless choices, every infinite path
    from a winning vertex satisfies the objective."""
    win = sol.win
    succ: dict[int, list[int]] = {}
    for v in win:
        if arena.owner[v] == player:
            labs = [w for lab, w in arena.edges[v] if lab == sol.strategy.get(v)]
            if not labs:
                return False
            succ[v] = labs[:1]
        else:
            succ[v] = [w for _, w in arena.edges[v]]
    for v in win:
        if any(w not in win for w in succ[v]):
            if arena.kind != "reach" or v not in arena.goal:
                return False
    if arena.kind == "safety":
        return all(v in arena.goal for v in win)
    if arena.kind == "reach":
        # no cycle avoiding the goal inside the fixed graph
        nodes = [v for v in win if v not in arena.goal]
        return not _has_cycle(nodes, succ, set(nodes))
    # buchi: no cycle avoiding the goal (every cycle visits goal)
    nodes = [v for v in win if v not in arena.goal]
    return not _has_cycle(nodes, succ, set(nodes))


def _has_cycle(nodes: list[int], succ: dict[int, list[int]], allowed: set[int]) -> bool:
    color = dict.fromkeys(nodes, 0)
    for s in nodes:
        if color[s]:
            continue
        stack = [(s, iter(succ[s]))]
        color[s] = 1
        while stack:
            v, it = stack[-1]
            for w in it:
                if w not in allowed:
                    continue
                if color[w] == 1:
                    return True
                if color[w] == 0:
                    color[w] = 1
                    stack.append((w, iter(succ[w])))
                    break
            else:
                color[v] = 2
                stack.pop()
    return False
