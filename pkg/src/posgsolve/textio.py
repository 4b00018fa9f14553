"""Text formats: `.game` files and `.strat` transducer files.

A `.game` document is a sequence of `key: value` sections; `delta:` is
followed by one transition per line:

    states: q0 q1 smiley
    init: q0                     (or a distribution: init: { q0: 1/2, q1: 1/2 })
    actions1: a b
    actions2: a b
    obs1: {q0 q1} {smiley}       (or: perfect | blind)
    obs2: perfect
    target: smiley
    safe: q0 q1 smiley           (optional)
    delta:
      q0 * * -> q1               (`*` matches every action; Dirac shorthand)
      q1 a * -> { smiley: 1/2, q1: 1/2 }

Explicit entries override wildcard ones. `//` starts a comment. Names that
contain spaces or any of `{}:,` must be double-quoted.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .game import Dist, Game, fold_initial, make_dist
from .transducer import Move, Transducer

_TOKEN = re.compile(r'\s*(?:"((?:[^"\\]|\\.)*)"|([{}:,]|->)|([^\s{}:,"]+))')
_BARE = re.compile(r'^[^\s{}:,"]+$')
_KEYS = ("states", "init", "actions1", "actions2", "obs1", "obs2", "target", "safe", "delta")


class ParseError(ValueError):
    def __init__(self, msg: str, line: int, col: int = 1):
        super().__init__(f"line {line}, col {col}: {msg}")
        self.line = line
        self.col = col


def quote(name: str) -> str:
    if _BARE.match(name) and name not in ("->", "*"):
        return name
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _tokens(text: str, line: int, col0: int) -> list[tuple[str, bool, int]]:
    """(token, is_name, column) triples; punctuation has is_name False."""
    out = []
    pos = 0
    while pos < len(text):
        if not text[pos:].strip():
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError("unterminated or invalid token", line, col0 + pos)
        col = col0 + m.start(0) + (len(m.group(0)) - len(m.group(0).lstrip()))
        if m.group(1) is not None:
            out.append((re.sub(r"\\(.)", r"\1", m.group(1)), True, col))
        elif m.group(2) is not None:
            out.append((m.group(2), False, col))
        else:
            out.append((m.group(3), True, col))
        pos = m.end(0)
    return out


def _strip_comment(raw: str) -> str:
    in_q = False
    i = 0
    while i < len(raw):
        c = raw[i]
        if c == "\\" and in_q:
            i += 2
            continue
        if c == '"':
            in_q = not in_q
        elif not in_q and raw.startswith("//", i):
            return raw[:i]
        i += 1
    return raw


def _prob(tok: str, line: int, col: int) -> Fraction:
    try:
        p = Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad probability {tok!r}", line, col) from None
    if p <= 0:
        raise ParseError(f"probability must be positive, got {tok}", line, col)
    return p


def _parse_dist(toks, i, line, sid) -> tuple[list[tuple[int, Fraction]], int]:
    if i >= len(toks):
        raise ParseError("expected successor or '{'", line)
    tok, is_name, col = toks[i]
    if is_name:
        if tok not in sid:
            raise ParseError(f"unknown state {tok!r}", line, col)
        return [(sid[tok], Fraction(1))], i + 1
    if tok != "{":
        raise ParseError(f"expected '{{', got {tok!r}", line, col)
    i += 1
    pairs = []
    while True:
        if i >= len(toks):
            raise ParseError("unterminated distribution", line)
        tok, is_name, col = toks[i]
        if tok == "}" and not is_name:
            i += 1
            break
        if not is_name or tok not in sid:
            raise ParseError(f"unknown state {tok!r}", line, col)
        q = sid[tok]
        if i + 2 >= len(toks) or toks[i + 1][0] != ":":
            raise ParseError("expected 'state: probability'", line, col)
        p = _prob(toks[i + 2][0], line, toks[i + 2][2])
        pairs.append((q, p))
        i += 3
        if i < len(toks) and toks[i][0] == "," and not toks[i][1]:
            i += 1
    total = sum(p for _, p in pairs)
    if total != 1:
        raise ParseError(f"distribution sums to {total}, expected 1", line)
    return pairs, i


def _parse_blocks(toks, line, sid, n) -> tuple[list[frozenset[int]], list[str] | None]:
    if len(toks) == 1 and toks[0][1] and toks[0][0] in ("perfect", "blind"):
        if toks[0][0] == "perfect":
            return [frozenset([q]) for q in range(n)], None
        return [frozenset(range(n))], None
    blocks = []
    i = 0
    while i < len(toks):
        tok, is_name, col = toks[i]
        if tok != "{" or is_name:
            raise ParseError("expected '{' opening an observation block", line, col)
        i += 1
        blk = []
        while i < len(toks) and not (toks[i][0] == "}" and not toks[i][1]):
            t, nm, c = toks[i]
            if t == "," and not nm:
                i += 1
                continue
            if not nm or t not in sid:
                raise ParseError(f"unknown state {t!r}", line, c)
            blk.append(sid[t])
            i += 1
        if i >= len(toks):
            raise ParseError("unterminated observation block", line)
        i += 1
        blocks.append(frozenset(blk))
    seen: dict[int, int] = {}
    for bi, blk in enumerate(blocks):
        for q in blk:
            if q in seen:
                raise ParseError(f"observation blocks {seen[q]} and {bi} overlap (not a partition)",
                                 line)
            seen[q] = bi
    missing = [q for q in range(n) if q not in seen]
    if missing:
        raise ParseError(f"observation blocks miss {len(missing)} state(s) (not a partition)", line)
    return blocks, None


def parse_game(text: str) -> Game:
    sections: dict[str, tuple[int, int, str]] = {}
    delta_lines: list[tuple[int, str]] = []
    current = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = _strip_comment(raw)
        if not body.strip():
            continue
        m = re.match(r"\s*([A-Za-z0-9_]+)\s*:(.*)$", body)
        if m and m.group(1) in _KEYS and not (current == "delta" and "->" in body):
            key = m.group(1)
            if key in sections:
                raise ParseError(f"duplicate section {key!r}", ln)
            sections[key] = (ln, m.start(2) + 1, m.group(2))
            current = key
            continue
        if current == "delta":
            delta_lines.append((ln, body))
        else:
            raise ParseError("text outside any section", ln)
    for key in _KEYS:
        if key not in sections and key != "safe":
            raise ParseError(f"missing section {key!r}", len(text.splitlines()) or 1)

    def names(key):
        ln, col, body = sections[key]
        toks = _tokens(body, ln, col)
        for t, is_name, c in toks:
            if not is_name:
                raise ParseError(f"unexpected {t!r}", ln, c)
        return [t for t, _, _ in toks], ln

    states, ln = names("states")
    if not states:
        raise ParseError("no states", ln)
    if len(set(states)) != len(states):
        raise ParseError("duplicate state name", ln)
    sid = {s: i for i, s in enumerate(states)}
    acts1, ln1 = names("actions1")
    acts2, ln2 = names("actions2")
    for acts, l_ in ((acts1, ln1), (acts2, ln2)):
        if not acts:
            raise ParseError("empty action alphabet", l_)
        if len(set(acts)) != len(acts) or "*" in acts:
            raise ParseError("duplicate or reserved action name", l_)
    a1 = {a: i for i, a in enumerate(acts1)}
    a2 = {b: i for i, b in enumerate(acts2)}

    ln, col, body = sections["init"]
    itoks = _tokens(body, ln, col)
    init_dist: Dist | None = None
    if len(itoks) == 1 and itoks[0][1]:
        if itoks[0][0] not in sid:
            raise ParseError(f"unknown state {itoks[0][0]!r}", ln, itoks[0][2])
        init = sid[itoks[0][0]]
    else:
        pairs, end = _parse_dist(itoks, 0, ln, sid)
        if end != len(itoks):
            raise ParseError("trailing tokens after init", ln, itoks[end][2])
        init_dist = make_dist(pairs)
        init = 0

    n = len(states)
    obs = []
    for key in ("obs1", "obs2"):
        ln, col, body = sections[key]
        blocks, _ = _parse_blocks(_tokens(body, ln, col), ln, sid, n)
        obs.append(blocks)

    def state_set(key):
        tl, l_ = names(key)
        for t in tl:
            if t not in sid:
                raise ParseError(f"unknown state {t!r}", l_)
        return frozenset(sid[t] for t in tl)

    target = state_set("target")
    safe = state_set("safe") if "safe" in sections else None

    table: list[list[list[tuple[int, Dist] | None]]] = [
        [[None] * len(acts2) for _ in acts1] for _ in states]
    for ln, body in delta_lines:
        toks = _tokens(body, ln, 1)
        if len(toks) < 5 or toks[3][0] != "->":
            raise ParseError("expected 'state action1 action2 -> distribution'", ln)
        (qt, _, qc), (at, _, ac), (bt, _, bc) = toks[0], toks[1], toks[2]
        if qt not in sid:
            raise ParseError(f"unknown state {qt!r}", ln, qc)
        if at != "*" and at not in a1:
            raise ParseError(f"unknown player-1 action {at!r}", ln, ac)
        if bt != "*" and bt not in a2:
            raise ParseError(f"unknown player-2 action {bt!r}", ln, bc)
        pairs, end = _parse_dist(toks, 4, ln, sid)
        if end != len(toks):
            raise ParseError("trailing tokens after distribution", ln, toks[end][2])
        d = make_dist(pairs)
        spec = (at != "*") + (bt != "*")
        q = sid[qt]
        for a in ([a1[at]] if at != "*" else range(len(acts1))):
            for b in ([a2[bt]] if bt != "*" else range(len(acts2))):
                prev = table[q][a][b]
                if prev is not None and prev[0] == spec:
                    raise ParseError(f"transition ({qt},{acts1[a]},{acts2[b]}) defined twice", ln)
                if prev is None or prev[0] < spec:
                    table[q][a][b] = (spec, d)
    for q in range(n):
        for a in range(len(acts1)):
            for b in range(len(acts2)):
                if table[q][a][b] is None:
                    ln = sections["delta"][0]
                    raise ParseError(
                        f"delta not total: missing ({states[q]},{acts1[a]},{acts2[b]})", ln)
    game = Game(
        states=tuple(states), init=init, actions1=tuple(acts1), actions2=tuple(acts2),
        delta=tuple(tuple(tuple(e[1] for e in row) for row in per_q) for per_q in table),  # type: ignore[index]
        obs1=tuple(obs[0]), obs2=tuple(obs[1]), target=target, safe=safe,
    )
    if init_dist is not None:
        game = fold_initial(game, init_dist)
    return game


def _fmt_dist(game: Game, d: Dist) -> str:
    if len(d) == 1:
        return quote(game.states[d[0][0]])
    return "{ " + ", ".join(f"{quote(game.states[q])}: {p}" for q, p in d) + " }"


def _fmt_blocks(game: Game, blocks) -> str:
    if all(len(b) == 1 for b in blocks) and [next(iter(b)) for b in blocks] == list(range(game.n)):
        return "perfect"
    return " ".join("{" + " ".join(quote(game.states[q]) for q in sorted(b)) + "}" for b in blocks)


def dump_game(game: Game) -> str:
    q_ = lambda xs: " ".join(quote(x) for x in xs)  # noqa: E731
    lines = [
        f"states: {q_(game.states)}",
        f"init: {quote(game.states[game.init])}",
        f"actions1: {q_(game.actions1)}",
        f"actions2: {q_(game.actions2)}",
        f"obs1: {_fmt_blocks(game, game.obs1)}",
        f"obs2: {_fmt_blocks(game, game.obs2)}",
        f"target: {q_(game.states[q] for q in sorted(game.target))}",
    ]
    if game.safe is not None:
        lines.append(f"safe: {q_(game.states[q] for q in sorted(game.safe))}")
    lines.append("delta:")
    for q, per_q in enumerate(game.delta):
        qn = quote(game.states[q])
        if len({d for per_a in per_q for d in per_a}) == 1:
            lines.append(f"  {qn} * * -> {_fmt_dist(game, per_q[0][0])}")
            continue
        for a, per_a in enumerate(per_q):
            an = quote(game.actions1[a])
            if len(set(per_a)) == 1:
                lines.append(f"  {qn} {an} * -> {_fmt_dist(game, per_a[0])}")
                continue
            for b, d in enumerate(per_a):
                lines.append(f"  {qn} {an} {quote(game.actions2[b])} -> {_fmt_dist(game, d)}")
    return "\n".join(lines) + "\n"


def _fmt_move(t: Transducer, mv: Move) -> str:
    if len(mv) == 1:
        return quote(t.actions[mv[0][0]])
    return "{ " + ", ".join(f"{quote(t.actions[a])}: {p}" for a, p in mv) + " }"


def dump_transducer(t: Transducer, player: int = 1, obs_labels: list[str] | None = None) -> str:
    mem = [t.label(m) for m in range(t.size)]
    if len(set(mem)) != len(mem):
        mem = [f"m{m}" for m in range(t.size)]
    lines = [
        f"strategy: player{player}",
        f"actions: {' '.join(quote(a) for a in t.actions)}",
        f"observations: {t.n_obs}",
        f"memory: {' '.join(quote(m) for m in mem)}",
        f"init: {quote(mem[t.m0])}",
        "table:",
    ]
    for m in range(t.size):
        for o in range(t.n_obs):
            note = f"  // {obs_labels[o]}" if obs_labels else ""
            lines.append(f"  {quote(mem[m])} {o} -> {_fmt_move(t, t.next[m][o])} / "
                         f"{quote(mem[t.update[m][o]])}{note}")
    return "\n".join(lines) + "\n"


def parse_transducer(text: str) -> tuple[Transducer, int]:
    """Parse a `.strat` document; returns the transducer and its player."""
    head: dict[str, tuple[int, list[tuple[str, bool, int]]]] = {}
    rows: list[tuple[int, list]] = []
    in_table = False
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = _strip_comment(raw)
        if not body.strip():
            continue
        m = re.match(r"\s*(strategy|actions|observations|memory|init|table)\s*:(.*)$", body)
        if m and not in_table:
            head[m.group(1)] = (ln, _tokens(m.group(2), ln, m.start(2) + 1))
            in_table = m.group(1) == "table"
            continue
        if not in_table:
            raise ParseError("text outside any section", ln)
        rows.append((ln, _tokens(body, ln, 1)))
    for key in ("strategy", "actions", "observations", "memory", "init", "table"):
        if key not in head:
            raise ParseError(f"missing section {key!r}", 1)
    ptok = head["strategy"][1]
    if len(ptok) != 1 or ptok[0][0] not in ("player1", "player2"):
        raise ParseError("strategy must be player1 or player2", head["strategy"][0])
    player = int(ptok[0][0][-1])
    actions = [t for t, _, _ in head["actions"][1]]
    aid = {a: i for i, a in enumerate(actions)}
    try:
        n_obs = int(head["observations"][1][0][0])
    except (ValueError, IndexError):
        raise ParseError("observations must be an integer", head["observations"][0]) from None
    mem = [t for t, _, _ in head["memory"][1]]
    mid = {m: i for i, m in enumerate(mem)}
    ini = head["init"][1]
    if len(ini) != 1 or ini[0][0] not in mid:
        raise ParseError("init must name a memory value", head["init"][0])
    upd: list[list[int | None]] = [[None] * n_obs for _ in mem]
    nxt: list[list[Move | None]] = [[None] * n_obs for _ in mem]
    for ln, toks in rows:
        if len(toks) < 6 or toks[2][0] != "->":
            raise ParseError("expected 'memory obs -> move / memory'", ln)
        m_, o_ = toks[0], toks[1]
        if m_[0] not in mid:
            raise ParseError(f"unknown memory {m_[0]!r}", ln, m_[2])
        try:
            o = int(o_[0])
        except ValueError:
            raise ParseError(f"bad observation id {o_[0]!r}", ln, o_[2]) from None
        if not 0 <= o < n_obs:
            raise ParseError(f"observation id {o} out of range", ln, o_[2])
        i = 3
        if toks[i][1]:
            if toks[i][0] not in aid:
                raise ParseError(f"unknown action {toks[i][0]!r}", ln, toks[i][2])
            mv: Move = ((aid[toks[i][0]], Fraction(1)),)
            i += 1
        else:
            pairs, i = _parse_dist(toks, i, ln, aid)
            mv = tuple(sorted(make_dist(pairs)))
        if i + 1 >= len(toks) or toks[i][0] != "/" or toks[i + 1][0] not in mid:
            raise ParseError("expected '/ memory' after move", ln)
        upd[mid[m_[0]]][o] = mid[toks[i + 1][0]]
        nxt[mid[m_[0]]][o] = mv
    for m in range(len(mem)):
        for o in range(n_obs):
            if upd[m][o] is None:
                raise ParseError(f"table not total: missing ({mem[m]}, {o})", head["table"][0])
    t = Transducer(actions=tuple(actions), n_obs=n_obs, m0=mid[ini[0][0]],
                   update=tuple(tuple(r) for r in upd),  # type: ignore[arg-type]
                   next=tuple(tuple(r) for r in nxt),  # type: ignore[arg-type]
                   labels=tuple(mem))
    return t, player
