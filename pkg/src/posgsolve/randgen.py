"""Seeded random games for agreement testing."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .game import Game, make_dist


@dataclass(frozen=True)
class GenConfig:
    max_states: int = 4
    min_states: int = 2
    actions1: int = 2
    actions2: int = 2
    p1_obs: str = "partial"     # partial | perfect | blind
    p2_obs: str = "perfect"     # perfect | partial | blind
    max_support: int = 2
    target_size: int = 1
    blocks1: int | None = None  # exact block count, overrides p1_obs
    blocks2: int | None = None


def _blocks(rng: random.Random, items: list[int], k: int) -> tuple[frozenset[int], ...]:
    """Random partition into exactly k nonempty blocks."""
    if not 1 <= k <= len(items):
        raise ValueError(f"cannot split {len(items)} states into {k} observation blocks")
    order = list(items)
    rng.shuffle(order)
    label = list(range(k)) + [rng.randrange(k) for _ in order[k:]]
    blocks: dict[int, set[int]] = {}
    for q, c in zip(order, label):
        blocks.setdefault(c, set()).add(q)
    return tuple(sorted((frozenset(b) for b in blocks.values()), key=min))


def _partition(rng: random.Random, items: list[int], kind: str) -> tuple[frozenset[int], ...]:
    if kind == "perfect":
        return tuple(frozenset([q]) for q in items)
    if kind == "blind":
        return (frozenset(items),)
    k = rng.randint(1, len(items))
    label = [rng.randrange(k) for _ in items]
    blocks: dict[int, set[int]] = {}
    for q, c in zip(items, label):
        blocks.setdefault(c, set()).add(q)
    return tuple(frozenset(b) for _, b in sorted(blocks.items()))


def random_game(rng: random.Random, cfg: GenConfig = GenConfig()) -> Game:
    if cfg.min_states < 2 or cfg.min_states > cfg.max_states:
        raise ValueError("need 2 <= min_states <= max_states")
    n = rng.randint(cfg.min_states, cfg.max_states)
    states = tuple(f"q{i}" for i in range(n))
    a1 = tuple("abcdefgh"[: cfg.actions1])
    a2 = tuple("xyzuvw"[: cfg.actions2])
    target = frozenset(rng.sample(range(1, n), min(cfg.target_size, n - 1)))
    delta = []
    for q in range(n):
        per_q = []
        for _ in a1:
            per_a = []
            for _ in a2:
                k = rng.randint(1, cfg.max_support)
                supp = rng.sample(range(n), k)
                per_a.append(make_dist((t, Fraction(1, k)) for t in supp))
            per_q.append(tuple(per_a))
        delta.append(tuple(per_q))
    return Game(states=states, init=0, actions1=a1, actions2=a2, delta=tuple(delta),
                obs1=(_partition(rng, list(range(n)), cfg.p1_obs) if cfg.blocks1 is None
                      else _blocks(rng, list(range(n)), cfg.blocks1)),
                obs2=(_partition(rng, list(range(n)), cfg.p2_obs) if cfg.blocks2 is None
                      else _blocks(rng, list(range(n)), cfg.blocks2)),
                target=target)


def corpus(seed: int, count: int, cfg: GenConfig = GenConfig()) -> list[Game]:
    rng = random.Random(seed)
    return [random_game(rng, cfg) for _ in range(count)]
