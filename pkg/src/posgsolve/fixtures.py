"""Builders for the named example games and the counter-system family."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .game import Game, build_game, fold_initial, make_dist

H = Fraction(1, 2)
FIXTURES = ("fig1", "fig3", "Ln", "Cn", "Gn", "fig9", "fig10")
PARAMETERIZED = ("Ln", "Cn", "Gn")


def fig1() -> Game:
    """Player 1 blind (except at the target), player 2 perfect.

    Player 2 picks q1 or q2 at q0; afterwards action a wins with 1/2 at q1
    and action b wins with 1/2 at q2, the wrong action loops.
    """
    S = "smiley"
    tr = {}
    for a in "ab":
        tr[("q0", a, "a")] = {"q1": 1}
        tr[("q0", a, "b")] = {"q2": 1}
        for b in "ab":
            tr[(S, a, b)] = {S: 1}
    for b in "ab":
        tr[("q1", "a", b)] = {S: H, "q1": H}
        tr[("q1", "b", b)] = {"q1": 1}
        tr[("q2", "a", b)] = {"q2": 1}
        tr[("q2", "b", b)] = {S: H, "q2": H}
    return build_game(
        states=["q0", "q1", "q2", S], init="q0", actions1="ab", actions2="ab",
        transitions=tr, obs1=[["q0", "q1", "q2"], [S]],
        obs2=[["q0"], ["q1"], ["q2"], [S]], target=[S])


def fig3() -> Game:
    """Player 1 perfect, player 2 blind; the right move at q2 depends on
    what player 2 believes."""
    S = "smiley"
    states = ["q0", "q1", "q2", "q3", "q4", "q5", S]
    tr = {}
    for a in "ab":
        tr[("q0", a, "a")] = {"q1": H, "q2": H}
        tr[("q0", a, "b")] = {"q2": H, "q3": H}
        tr[("q4", a, "a")] = {S: 1}
        tr[("q4", a, "b")] = {"q0": 1}
        tr[("q5", a, "a")] = {"q0": 1}
        tr[("q5", a, "b")] = {S: 1}
        for b in "ab":
            tr[("q1", a, b)] = {"q4": 1}
            tr[("q3", a, b)] = {"q5": 1}
            tr[(S, a, b)] = {S: 1}
        tr[("q2", "a", a)] = {"q4": 1}
        tr[("q2", "b", a)] = {"q5": 1}
    return build_game(states=states, init="q0", actions1="ab", actions2="ab",
                      transitions=tr, obs1=[[s] for s in states], obs2=[states],
                      target=[S])


def fig9() -> Game:
    """Player 1 perfect, player 2 blind, initial distribution 1/2 q1 + 1/2 q2.

    The distribution is folded into a fresh state `init`.
    """
    S = "smiley"
    states = ["q1", "q2", "q3", "q4", S]
    tr = {}
    for a in "ab":
        for b in "ab":
            tr[(S, a, b)] = {S: 1}
        tr[("q3", a, "a")] = {"q1": 1}
        tr[("q3", a, "b")] = {"q1": H, S: H}
        tr[("q4", a, "a")] = {"q2": H, S: H}
        tr[("q4", a, "b")] = {"q2": 1}
    for b in "ab":
        tr[("q1", "a", b)] = {"q3": 1}
        tr[("q2", "a", b)] = {"q4": 1}
        tr[("q1", "b", b)] = {"q1": H, "q2": H}
        tr[("q2", "b", b)] = {"q1": H, "q2": H}
    g = build_game(states=states, init="q1", actions1="ab", actions2="ab",
                   transitions=tr, obs1=[[s] for s in states], obs2=[states],
                   target=[S])
    return fold_initial(g, make_dist([(0, H), (1, H)]))


def L(n: int) -> Game:
    """The L_n family: player 1 perfect, player 2 blind, target q_0."""
    if n < 1:
        raise ValueError("L_n needs n >= 1")
    chain = [f"q_{k}" for k in range(n, -1, -1)]
    states = ["q_I", "L", "R"] + chain
    top = f"q_{n}"
    tr = {}
    for a in "ab":
        for b in "ab":
            tr[("q_I", a, b)] = {"L": H, "R": H}
            tr[("q_0", a, b)] = {"q_0": 1}
    for s in ("L", "R"):
        for b in "ab":
            tr[(s, "a", b)] = {"q_I": 1}
            tr[(s, "b", b)] = {top: 1}
    for k in range(n, 0, -1):
        q = f"q_{k}"
        for a in "ab":
            for b in "ab":
                tr[(q, a, b)] = {top: 1} if a == b else {f"q_{k - 1}": 1}
    return build_game(states=states, init="q_I", actions1="ab", actions2="ab",
                      transitions=tr, obs1=[[s] for s in states], obs2=[states],
                      target=["q_0"])


@dataclass(frozen=True)
class CounterSystem:
    """C_n: states q_n..q_0 and counters c_1..c_n.

    The self-loop on q_i (i >= 1) increments c_i and halves (rounding down)
    every c_j with j > i. The move q_1 -> q_0 halves every counter; the other
    moves q_i -> q_{i-1} leave counters unchanged.
    """

    n: int

    @property
    def states(self) -> tuple[str, ...]:
        return tuple(f"q_{i}" for i in range(self.n, -1, -1))

    def loop(self, i: int, counters: list[int], times: int = 1) -> list[int]:
        """Take the q_i self-loop `times` times (closed form)."""
        c = list(counters)
        c[i - 1] += times
        for j in range(i, self.n):
            c[j] >>= times
        return c

    def execute(self, loops: dict[int, int]) -> list[int]:
        """Run q_n -> ... -> q_0 taking loops[i] self-loops at q_i."""
        c = [0] * self.n
        for i in range(self.n, 0, -1):
            c = self.loop(i, c, loops.get(i, 0))
        return [x >> 1 for x in c]

    def succeeds(self, loops: dict[int, int]) -> bool:
        return all(x >= 1 for x in self.execute(loops))

    def shortest_loops(self) -> dict[int, int]:
        """Loop counts of the shortest successful run: k_1 = 2, k_{i+1} = k_i * 2**k_i."""
        out = {}
        k = 2
        for i in range(1, self.n + 1):
            out[i] = k
            if i < self.n:
                k = k << k
        return out


def C(n: int) -> CounterSystem:
    if n < 1:
        raise ValueError("C_n needs n >= 1")
    return CounterSystem(n)


_LINE_PREFIX = "qrstuvwxyz"
_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def G(n: int) -> Game:
    """The G_n family simulating the n-counter system with gadgets.

    Line j (one per counter) runs through layers 1..n+1 separated by `#`:
    idle gadgets before layer n-j+1, an increment gadget there, merged
    division gadgets after it, and a final division gadget whose exit pays
    off when player 2 plays the line's selector letter. Undepicted moves go
    to q_I. Player 2 observes q_I, observes that `#` was just played, and
    nothing else; player 1 observes states.
    """
    if n < 1:
        raise ValueError("G_n needs n >= 1")
    if n > len(_LINE_PREFIX):
        raise ValueError(f"G_n supports n <= {len(_LINE_PREFIX)}")
    S = "smiley"
    A1 = ("a", "b", "#")
    A2 = tuple(_LETTERS[:max(2, n)])
    ab = ("a", "b")
    states = ["q_I"]
    # raw[(state, p1 action)] = {p2 action: {succ: p}}; missing -> q_I
    raw: dict[tuple[str, str], dict[str, dict[str, Fraction]]] = {}

    def put(s, a, b, succ):
        raw.setdefault((s, a), {})[b] = succ if isinstance(succ, dict) else {succ: Fraction(1)}

    def every_b(s, a, succ):
        for b in A2:
            put(s, a, b, succ)

    entries = []
    for j in range(1, n + 1):
        p = _LINE_PREFIX[j - 1]
        inc = n - j + 1
        num = n + 4
        names: list[str] = []

        def fresh():
            nonlocal num
            s = f"{p}{num}"
            num -= 1
            names.append(s)
            return s

        # layer -> (entry state, function wiring its exits to the next entry)
        pending: list[tuple[str, bool]] = []  # states whose '#' goes to the next entry
        first = None
        for layer in range(1, n + 2):
            if layer < inc:
                s = fresh()
                entry = s
                for a in ab:
                    every_b(s, a, s)
                new_pending = [(s, True)]
            elif layer == inc:
                e = fresh()
                lft, rgt = f"{p}_L", f"{p}_R"
                names.extend([lft, rgt])
                qab = fresh()
                x = fresh()
                entry = e
                for a in A1:
                    every_b(e, a, {lft: H, rgt: H})
                    every_b(lft, a, qab)
                    every_b(rgt, a, qab)
                for a in ab:
                    for b in A2:
                        put(qab, a, b, e if a == b else x)
                    every_b(x, a, x)
                new_pending = [(x, True)]
            elif layer <= n:
                d = fresh()
                entry = d
                for a in ab:
                    for b in A2:
                        put(d, a, b, "q_I" if a == b else d)
                new_pending = [(d, True)]
            else:
                f = fresh()
                z = fresh()
                entry = f
                sel = {_LETTERS[j - 1]}
                if j == n:
                    sel |= set(A2[n - 1:])
                for a in ab:
                    for b in A2:
                        put(f, a, b, "q_I" if a == b else z)
                for a in A1:
                    for b in A2:
                        if b in sel:
                            put(z, a, b, S)
                new_pending = []
            for s, _ in pending:
                every_b(s, "#", entry)
            pending = new_pending
            if first is None:
                first = entry
        entries.append(first)
        states.extend(names)
    states.append(S)
    k = Fraction(1, n)
    for a in A1:
        every_b("q_I", a, {e: k for e in entries})

    # Player 2 sees '#': states entered by '#' go to a dedicated block, and
    # states entered both ways get a '#'-copy with identical behaviour.
    hash_in: set[str] = set()
    other_in: set[str] = {"q_I"}
    for (s, a), row in raw.items():
        for succ in row.values():
            for t in succ:
                (hash_in if a == "#" else other_in).add(t)
    split = sorted((hash_in & other_in) - {"q_I", S}, key=states.index)
    copy = {t: f"{t}#" for t in split}
    for t in split:
        for a in A1:
            if (t, a) in raw:
                raw[(copy[t], a)] = dict(raw[(t, a)])
    for (s, a), row in list(raw.items()):
        if a != "#":
            continue
        for b, succ in row.items():
            row[b] = {copy.get(t, t): p for t, p in succ.items()}
    for t in split:
        states.insert(states.index(t) + 1, copy[t])
    hash_block = [s for s in states
                  if s in copy.values() or (s in hash_in and s not in other_in and s != S)]

    tr = {}
    for s in states:
        if s == S:
            continue
        for a in A1:
            for b in A2:
                succ = raw.get((s, a), {}).get(b)
                if succ is not None:
                    tr[(s, a, b)] = succ
    rest = [s for s in states if s != "q_I" and s not in hash_block]
    obs2 = [["q_I"], rest] + ([hash_block] if hash_block else [])
    return build_game(states=states, init="q_I", actions1=A1, actions2=A2, transitions=tr,
                      obs1=[[s] for s in states], obs2=obs2, target=[S], default="q_I")


def fig10() -> Game:
    """The doubled version of fig1 with a sink, built by hand.

    Every state q gets copies (q,a), (q,b); from q player 1 commits to an
    action, from (q,a) repeating a resumes fig1 and anything else falls
    into the sink.
    """
    base = fig1()
    S = "smiley"
    qs = ["q0", "q1", "q2", S]
    states = qs + [f"{q},{a}" for q in qs for a in "ab"] + ["sink"]
    tr: dict = {}
    for a in "ab":
        for b in "ab":
            tr[("sink", a, b)] = {"sink": 1}
            tr[(S, a, b)] = {S: 1}
            for q in qs:
                tr[(f"{q},{a}", a, b)] = {base.states[t]: p for t, p in
                                         base.delta[base.state_id(q)][base.action1_id(a)][
                                             base.action2_id(b)]}
                other = "b" if a == "a" else "a"
                tr[(f"{q},{a}", other, b)] = {"sink": 1}
                if q != S:
                    tr[(q, a, b)] = {f"{q},{a}": 1}
    for a in "ab":
        for b in "ab":
            tr[(f"{S},{a}", a, b)] = {f"{S},{a}": 1}
            tr[(f"{S},{a}", "b" if a == "a" else "a", b)] = {f"{S},{a}": 1}
    blind = ["q0", "q1", "q2"] + [f"{q},{a}" for q in ("q0", "q1", "q2") for a in "ab"]
    return build_game(
        states=states, init="q0", actions1="ab", actions2="ab", transitions=tr,
        obs1=[blind, [S, f"{S},a", f"{S},b"], ["sink"]],
        obs2=[[q, f"{q},a", f"{q},b"] for q in qs] + [["sink"]],
        target=[S, f"{S},a", f"{S},b"])


def build_fixture(name: str, n: int | None = None):
    """Game for a fixture id; `Cn` returns a CounterSystem instead."""
    if name not in FIXTURES:
        raise ValueError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    if name in PARAMETERIZED:
        if n is None:
            raise ValueError(f"fixture {name} needs a size parameter n")
        if n < 1:
            raise ValueError("n must be >= 1")
        return {"Ln": L, "Cn": C, "Gn": G}[name](n)
    return {"fig1": fig1, "fig3": fig3, "fig9": fig9, "fig10": fig10}[name]()
