"""Finite-memory strategies as deterministic transducers over observation blocks.

At step k the strategy reads the current observation block o_k, plays
next[m_k][o_k] and moves to memory update[m_k][o_k].
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

Move = tuple[tuple[int, Fraction], ...]


def pure_move(a: int) -> Move:
    return ((a, Fraction(1)),)


def uniform_move(actions: Sequence[int]) -> Move:
    acts = sorted(set(actions))
    p = Fraction(1, len(acts))
    return tuple((a, p) for a in acts)


@dataclass(frozen=True)
class Transducer:
    actions: tuple[str, ...]
    n_obs: int
    m0: int
    update: tuple[tuple[int, ...], ...]
    next: tuple[tuple[Move, ...], ...]
    labels: tuple[str, ...] | None = None

    @property
    def size(self) -> int:
        return len(self.update)

    @property
    def is_pure(self) -> bool:
        return all(len(mv) == 1 for row in self.next for mv in row)

    def label(self, m: int) -> str:
        return self.labels[m] if self.labels else f"m{m}"

    def check(self) -> list[str]:
        errs = []
        k = self.size
        if len(self.next) != k:
            errs.append("next table and update table differ in memory size")
        if not 0 <= self.m0 < k:
            errs.append("initial memory out of range")
        for m in range(k):
            if len(self.update[m]) != self.n_obs or len(self.next[m]) != self.n_obs:
                errs.append(f"memory {m}: tables not total over {self.n_obs} observations")
                continue
            for o in range(self.n_obs):
                if not 0 <= self.update[m][o] < k:
                    errs.append(f"memory {m}, obs {o}: update out of range")
                mv = self.next[m][o]
                if not mv or sum(p for _, p in mv) != 1 or any(p <= 0 for _, p in mv):
                    errs.append(f"memory {m}, obs {o}: next is not a distribution")
                if any(not 0 <= a < len(self.actions) for a, _ in mv):
                    errs.append(f"memory {m}, obs {o}: unknown action")
        return errs

    def run(self, observations: Sequence[int]) -> list[Move]:
        """Moves played along an observation sequence."""
        m = self.m0
        out = []
        for o in observations:
            out.append(self.next[m][o])
            m = self.update[m][o]
        return out

    def reachable(self) -> "Transducer":
        """Drop memory values unreachable from m0."""
        seen = [self.m0]
        idx = {self.m0: 0}
        i = 0
        while i < len(seen):
            m = seen[i]
            for o in range(self.n_obs):
                t = self.update[m][o]
                if t not in idx:
                    idx[t] = len(seen)
                    seen.append(t)
            i += 1
        return Transducer(
            actions=self.actions, n_obs=self.n_obs, m0=0,
            update=tuple(tuple(idx[self.update[m][o]] for o in range(self.n_obs)) for m in seen),
            next=tuple(self.next[m] for m in seen),
            labels=None if self.labels is None else tuple(self.labels[m] for m in seen),
        )

    def minimized(self) -> "Transducer":
        """Mealy-machine minimization by partition refinement (reachable part)."""
        t = self.reachable()
        k = t.size
        cls = {}
        block = []
        for m in range(k):
            key = t.next[m]
            block.append(cls.setdefault(key, len(cls)))
        while True:
            cls = {}
            new = []
            for m in range(k):
                key = (block[m], tuple(block[t.update[m][o]] for o in range(t.n_obs)))
                new.append(cls.setdefault(key, len(cls)))
            if len(cls) == len(set(block)):
                block = new
                break
            block = new
        reps: dict[int, int] = {}
        for m in range(k):
            reps.setdefault(block[m], m)
        order = sorted(reps, key=lambda c: reps[c])
        ren = {c: i for i, c in enumerate(order)}
        return Transducer(
            actions=t.actions, n_obs=t.n_obs, m0=ren[block[t.m0]],
            update=tuple(tuple(ren[block[t.update[reps[c]][o]]] for o in range(t.n_obs))
                         for c in order),
            next=tuple(t.next[reps[c]] for c in order),
            labels=None if t.labels is None else tuple(t.labels[reps[c]] for c in order),
        )


def memoryless(actions: Sequence[str], choice: Sequence[int | Move]) -> Transducer:
    """One-memory transducer playing choice[o] on observation o."""
    moves = tuple(c if isinstance(c, tuple) else pure_move(c) for c in choice)
    return Transducer(actions=tuple(actions), n_obs=len(moves), m0=0,
                      update=(tuple(0 for _ in moves),), next=(moves,))


def constant(actions: Sequence[str], n_obs: int, a: int) -> Transducer:
    return memoryless(actions, [a] * n_obs)
