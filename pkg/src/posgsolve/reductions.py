"""Strategy-class reductions.

rand_to_pure: player 1 picks a nonempty subset of actions and the game
moves by the uniform mixture over it, so pure strategies of the new game
are the uniform action-invisible strategies of the old one.

pure_to_rand: every action must be played twice in a row; a mismatch
falls into an absorbing sink, which makes randomizing useless.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .game import Game, dirac, make_dist, normalize
from .transducer import Move, Transducer

SUBSET_CAP = 8
SINK = "sink"


@dataclass(frozen=True)
class ReductionCertificate:
    direction: str
    state_map: dict[str, list[str]]
    action_map: dict[str, list[str]]
    notes: str
    source_actions: tuple[str, ...] = ()
    target_actions: tuple[str, ...] = ()
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({
            "direction": self.direction,
            "state_map": self.state_map,
            "action_map": self.action_map,
            "notes": self.notes,
            "source_actions": list(self.source_actions),
            "target_actions": list(self.target_actions),
            "extra": self.extra,
        }, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ReductionCertificate":
        d = json.loads(text)
        if d.get("direction") not in ("rand2pure", "pure2rand"):
            raise ValueError(f"unknown certificate direction {d.get('direction')!r}")
        return cls(d["direction"], d["state_map"], d["action_map"], d.get("notes", ""),
                   tuple(d.get("source_actions", ())), tuple(d.get("target_actions", ())),
                   d.get("extra", {}))


def subset_label(actions, mask: int) -> str:
    return "{" + ",".join(a for i, a in enumerate(actions) if mask >> i & 1) + "}"


def subset_masks(k: int) -> list[int]:
    """Nonempty subsets of k actions, singletons first."""
    return sorted(range(1, 1 << k), key=lambda m: (bin(m).count("1"), m))


def rand_to_pure(game: Game, cap: int = SUBSET_CAP) -> tuple[Game, ReductionCertificate]:
    k = len(game.actions1)
    if k > cap:
        raise ValueError(f"{k} player-1 actions exceed the subset cap {cap}")
    masks = subset_masks(k)
    labels = tuple(subset_label(game.actions1, m) for m in masks)
    rows = []
    for per_q in game.delta:
        row = []
        for m in masks:
            acts = [a for a in range(k) if m >> a & 1]
            w = Fraction(1, len(acts))
            row.append(tuple(
                make_dist((t, p * w) for a in acts for t, p in per_q[a][b])
                for b in range(len(game.actions2))))
        rows.append(tuple(row))
    h = Game(states=game.states, init=game.init, actions1=labels, actions2=game.actions2,
             delta=tuple(rows), obs1=game.obs1, obs2=game.obs2, target=game.target,
             safe=game.safe, obs1_names=game.obs1_names, obs2_names=game.obs2_names)
    cert = ReductionCertificate(
        direction="rand2pure",
        state_map={q: [q] for q in game.states},
        action_map={lab: [a for i, a in enumerate(game.actions1) if m >> i & 1]
                    for lab, m in zip(labels, masks)},
        notes="subset action plays its members uniformly",
        source_actions=game.actions1, target_actions=labels)
    return h, cert


def pure_to_rand(game: Game) -> tuple[Game, ReductionCertificate]:
    game = normalize(game)
    n, k = game.n, len(game.actions1)
    names = list(game.states) + [f"{q},{a}" for q in game.states for a in game.actions1]
    sink_name = SINK
    while sink_name in names:
        sink_name += "'"
    names.append(sink_name)
    sink = len(names) - 1

    def copy(q, a):
        return n + q * k + a

    nb = len(game.actions2)
    rows = []
    for q in range(n):
        if q in game.target:
            rows.append(tuple(tuple(dirac(q) for _ in range(nb)) for _ in range(k)))
        else:
            rows.append(tuple(tuple(dirac(copy(q, a)) for _ in range(nb)) for a in range(k)))
    for q in range(n):
        for a in range(k):
            c = copy(q, a)
            if q in game.target:
                rows.append(tuple(tuple(dirac(c) for _ in range(nb)) for _ in range(k)))
                continue
            rows.append(tuple(
                tuple(game.delta[q][a][b] if a2 == a else dirac(sink) for b in range(nb))
                for a2 in range(k)))
    rows.append(tuple(tuple(dirac(sink) for _ in range(nb)) for _ in range(k)))

    def lift(blocks):
        out = [frozenset(list(blk) + [copy(q, a) for q in blk for a in range(k)])
               for blk in blocks]
        return tuple(out) + (frozenset([sink]),)

    def lift_names(bn):
        return None if bn is None else tuple(bn) + (sink_name,)

    target = frozenset(list(game.target) + [copy(q, a) for q in game.target for a in range(k)])
    safe = None if game.safe is None else frozenset(
        list(game.safe) + [copy(q, a) for q in game.safe for a in range(k)])
    h = Game(states=tuple(names), init=game.init, actions1=game.actions1,
             actions2=game.actions2, delta=tuple(rows), obs1=lift(game.obs1),
             obs2=lift(game.obs2), target=target, safe=safe,
             obs1_names=lift_names(game.obs1_names), obs2_names=lift_names(game.obs2_names))
    assert h.n == n * (1 + k) + 1
    cert = ReductionCertificate(
        direction="pure2rand",
        state_map={q: [q] + [f"{q},{a}" for a in game.actions1] for q in game.states},
        action_map={a: [a] for a in game.actions1},
        notes="each action is played twice; a mismatch moves to the sink",
        source_actions=game.actions1, target_actions=game.actions1,
        extra={"sink": sink_name})
    return h, cert


def _mix(moves: list[tuple[Fraction, Move]]) -> Move:
    acc: dict[int, Fraction] = {}
    for w, mv in moves:
        for a, p in mv:
            acc[a] = acc.get(a, Fraction(0)) + w * p
    return tuple(sorted((a, p) for a, p in acc.items() if p))


def transfer_strategy(cert: ReductionCertificate, strat: Transducer) -> Transducer:
    """Map a witness of the constructed game back to the source game."""
    if tuple(strat.actions) != tuple(cert.target_actions):
        raise ValueError("strategy actions do not match the certificate's constructed game")
    if cert.direction == "rand2pure":
        src = cert.source_actions
        pos = {a: i for i, a in enumerate(src)}
        members = [[pos[a] for a in cert.action_map[lab]] for lab in cert.target_actions]

        def conv(mv: Move) -> Move:
            parts = []
            for h_act, p in mv:
                acts = members[h_act]
                parts.append((p, tuple((a, Fraction(1, len(acts))) for a in acts)))
            return _mix(parts)

        return Transducer(actions=src, n_obs=strat.n_obs, m0=strat.m0, update=strat.update,
                          next=tuple(tuple(conv(mv) for mv in row) for row in strat.next),
                          labels=strat.labels)
    # pure2rand: the constructed game has one extra observation block (the sink)
    n_obs = strat.n_obs - 1
    if n_obs < 1:
        raise ValueError("strategy is not observation-consistent with the certificate")

    def first(mv: Move) -> Move:
        a = max(mv, key=lambda x: (x[1], -x[0]))[0]
        return ((a, Fraction(1)),)

    upd = tuple(tuple(strat.update[strat.update[m][o]][o] for o in range(n_obs))
                for m in range(strat.size))
    nxt = tuple(tuple(first(strat.next[m][o]) for o in range(n_obs)) for m in range(strat.size))
    return Transducer(actions=strat.actions, n_obs=n_obs, m0=strat.m0, update=upd, next=nxt,
                      labels=strat.labels).minimized()


def lift_strategy(cert: ReductionCertificate, strat: Transducer) -> Transducer:
    """Source witness to constructed-game witness (the converse of transfer)."""
    if cert.direction == "rand2pure":
        labels = cert.target_actions
        index = {}
        for i, lab in enumerate(labels):
            index[frozenset(cert.action_map[lab])] = i
        src = cert.source_actions

        def conv(mv: Move) -> Move:
            support = frozenset(src[a] for a, _ in mv)
            if any(p != mv[0][1] for _, p in mv):
                raise ValueError("only uniform moves lift to subset actions")
            return ((index[support], Fraction(1)),)

        return Transducer(actions=labels, n_obs=strat.n_obs, m0=strat.m0, update=strat.update,
                          next=tuple(tuple(conv(mv) for mv in row) for row in strat.next),
                          labels=strat.labels)
    # pure2rand: memory (m, phase); phase 0 reads q, phase 1 reads the copy
    k = strat.size
    n_obs = strat.n_obs + 1
    sink_obs = strat.n_obs
    upd, nxt = [], []
    for m in range(k):
        upd.append(tuple(k + m if o != sink_obs else m for o in range(n_obs)))
        nxt.append(tuple(strat.next[m][o] if o != sink_obs else strat.next[m][0]
                         for o in range(n_obs)))
    for m in range(k):
        upd.append(tuple(strat.update[m][o] if o != sink_obs else m for o in range(n_obs)))
        nxt.append(tuple(strat.next[m][o] if o != sink_obs else strat.next[m][0]
                         for o in range(n_obs)))
    return Transducer(actions=strat.actions, n_obs=n_obs, m0=strat.m0, update=tuple(upd),
                      next=tuple(nxt))


def isomorphic(g: Game, h: Game) -> dict[str, str] | None:
    """State renaming g -> h preserving everything, or None.

    Actions and observation partitions are matched by name and block
    content respectively; search is a backtracking match from the initial
    state following transitions.
    """
    if (g.n, g.actions1, g.actions2) != (h.n, h.actions1, h.actions2):
        return None
    if len(g.obs1) != len(h.obs1) or len(g.obs2) != len(h.obs2):
        return None
    na, nb = len(g.actions1), len(g.actions2)

    def sig(game, q):
        return (q in game.target, len(game.obs1[game.obs1_of[q]]),
                len(game.obs2[game.obs2_of[q]]),
                tuple(tuple(tuple(sorted(p for _, p in game.delta[q][a][b]))
                            for b in range(nb)) for a in range(na)))

    sg = [sig(g, q) for q in range(g.n)]
    sh = [sig(h, q) for q in range(h.n)]

    def consistent(mp: dict[int, int]) -> bool:
        for q, r in mp.items():
            for a in range(na):
                for b in range(nb):
                    for t, p in g.delta[q][a][b]:
                        if t in mp and dict(h.delta[r][a][b]).get(mp[t]) != p:
                            return False
        return True

    def blocks_ok(mp):
        for blocks_g, of_g, of_h in ((g.obs1, g.obs1_of, h.obs1_of), (g.obs2, g.obs2_of, h.obs2_of)):
            for blk in blocks_g:
                imgs = {of_h[mp[q]] for q in blk}
                if len(imgs) != 1:
                    return False
            pairs = {}
            for q in range(g.n):
                pairs.setdefault(of_h[mp[q]], set()).add(of_g[q])
            if any(len(v) != 1 for v in pairs.values()):
                return False
        return True

    order = []
    seen = {g.init}
    stack = [g.init]
    while stack:
        q = stack.pop()
        order.append(q)
        for a in range(na):
            for b in range(nb):
                for t, _ in g.delta[q][a][b]:
                    if t not in seen:
                        seen.add(t)
                        stack.append(t)
    order += [q for q in range(g.n) if q not in seen]

    def go(i, mp, used):
        if i == len(order):
            return dict(mp) if blocks_ok(mp) else None
        q = order[i]
        cands = [h.init] if q == g.init else range(h.n)
        for r in cands:
            if r in used or sh[r] != sg[q]:
                continue
            mp[q] = r
            used.add(r)
            if consistent(mp):
                res = go(i + 1, mp, used)
                if res is not None:
                    return res
            del mp[q]
            used.discard(r)
        return None

    res = go(0, {}, set())
    if res is None:
        return None
    return {g.states[q]: h.states[r] for q, r in res.items()}


__all__ = ["ReductionCertificate", "rand_to_pure", "pure_to_rand", "transfer_strategy",
           "lift_strategy", "isomorphic", "subset_label"]
