"""`posg` command line: parse, solve, reduce, verify, generate, compare.

Exit codes: 0 win, 1 lose, 2 unknown within bound, 3 input error or
out-of-scope request, 4 budget exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import antichain, belief, counting, oracle, randgen, reductions
from .answer import LOSE, UNKNOWN, WIN, BudgetExceeded, QualitativeAnswer, ScopeError
from .fixtures import FIXTURES, PARAMETERIZED, CounterSystem, build_fixture
from .game import Game, buchi_to_reach, normalize, validate
from .textio import ParseError, dump_game, dump_transducer, parse_game, parse_transducer
from .transducer import Transducer

EXIT_WIN, EXIT_LOSE, EXIT_UNKNOWN, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3, 4
EXIT_OF = {WIN: EXIT_WIN, LOSE: EXIT_LOSE, UNKNOWN: EXIT_UNKNOWN}
SCHEMA = "posg-report/1"


class InputError(Exception):
    pass


def _plain(x):
    """JSON-safe view of diagnostics."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items() if not isinstance(v, (Game, Transducer))}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [_plain(v) for v in x]
        return sorted(items, key=repr) if isinstance(x, (set, frozenset)) else items
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    return repr(x)


def load_game(path: str) -> Game:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    try:
        g = parse_game(text)
    except ParseError as e:
        raise InputError(f"{path}: {e}") from None
    errs = validate(g)
    if errs:
        raise InputError(f"{path}: " + "; ".join(errs))
    return g


def load_strategy(path: str) -> Transducer:
    try:
        t, player = parse_transducer(Path(path).read_text())
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    except ParseError as e:
        raise InputError(f"{path}: {e}") from None
    if player != 1:
        raise InputError(f"{path}: expected a player-1 strategy")
    errs = t.check()
    if errs:
        raise InputError(f"{path}: " + "; ".join(errs))
    return t


def _write(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def emit(args, report: dict) -> None:
    report = {"schema": SCHEMA, **report}
    if args.report == "structured":
        print(json.dumps(_plain(report), indent=2, sort_keys=True))
        return
    for k, v in report.items():
        if k in ("schema", "diagnostics", "rows"):
            continue
        print(f"{k}: {v}")
    for row in report.get("rows", ()):
        print("  " + "  ".join(f"{k}={v}" for k, v in row.items()))
    diag = report.get("diagnostics") or {}
    for k, v in _plain(diag).items():
        print(f"  {k}: {v}")


def obs_labels(g: Game) -> list[str]:
    return [g.obs1_label(i) for i in range(len(g.obs1))]


# ---------------------------------------------------------------- solving

def solve_game(g: Game, mode: str, cls: str = "pure", backend: str = "explicit",
               k_cap: int | None = None, budget: int = counting.DEFAULT_NODE_BUDGET
               ) -> tuple[QualitativeAnswer, Game, dict]:
    """Dispatch on side information. Returns the answer, the game its
    witness refers to, and dispatch notes."""
    g = normalize(g)
    if cls == "rand-invisible":
        h, cert = reductions.rand_to_pure(g)
        ans, wg, notes = solve_game(h, mode, "pure", backend, k_cap, budget)
        notes = {**notes, "pipeline": "rand_to_pure"}
        if ans.win and not notes["revealed"]:
            w = reductions.transfer_strategy(cert, ans.witness)
            return QualitativeAnswer(WIN, w, ans.diagnostics), g, notes
        # a witness on a revealed game keeps the subset actions of the reduction
        return ans, (wg if ans.win else g), notes
    side = g.side
    if side.player2 == "perfect":
        if backend == "antichain":
            ans = antichain.solve_symbolic(g, mode, witness=True)
        else:
            ans = belief.solve_pure(g, mode)
        return ans, g, {"solver": f"belief-obligation ({backend})", "revealed": False}
    if side.player1 == "perfect":
        if mode == "positive":
            ans = counting.solve_pos_reach_safe(g, k_cap=k_cap, budget=budget)
        else:
            ans = counting.solve_almost_sure_p1perfect(g, k_cap=k_cap, budget=budget)
        wg = ans.diagnostics.get("witness_game", g)
        return ans, wg, {"solver": "counting", "revealed": bool(ans.diagnostics.get("revealed")),
                         "k_cap": ans.diagnostics.get("k_cap"),
                         "truncated": bool(ans.diagnostics.get("cap_fired"))}
    raise ScopeError("both players observe partially: no direct solver. Try "
                     "`posg oracle` for bounded-memory answers, or `posg reduce` "
                     "to change the strategy class")


def cmd_solve(args) -> int:
    g = load_game(args.game)
    try:
        ans, wg, notes = solve_game(g, args.mode, args.cls, args.backend, args.k_cap,
                                    args.budget)
    except ScopeError as e:
        emit(args, {"command": "solve", "verdict": "refused", "reason": str(e)})
        return EXIT_INPUT
    except ValueError as e:
        raise InputError(str(e)) from None
    report = {"command": "solve", "mode": args.mode, "class": args.cls,
              "verdict": ans.verdict, **notes, "diagnostics": ans.diagnostics}
    if ans.win and ans.witness is not None:
        report["witness_memory"] = ans.witness.size
        if args.out:
            _write(args.out, dump_transducer(ans.witness, 1, obs_labels(wg)))
            report["witness"] = args.out
        if notes["revealed"] and args.witness_game:
            _write(args.witness_game, dump_game(wg))
            report["witness_game"] = args.witness_game
    emit(args, report)
    return EXIT_OF[ans.verdict]


def cmd_validate(args) -> int:
    g = load_game(args.game)
    emit(args, {"command": "validate", "valid": True, "states": g.n,
                "player1": g.side.player1, "player2": g.side.player2})
    return EXIT_WIN


def cmd_reduce(args) -> int:
    g = load_game(args.input)
    if args.direction == "rand2pure":
        h, cert = reductions.rand_to_pure(g)
    elif args.direction == "pure2rand":
        h, cert = reductions.pure_to_rand(g)
    else:
        buchi = args.buchi.split(",") if args.buchi else sorted(g.states[q] for q in g.target)
        try:
            h = buchi_to_reach(g, buchi)
        except KeyError as e:
            raise InputError(str(e)) from None
        cert = None
    _write(args.output, dump_game(h))
    if args.cert:
        if cert is None:
            raise InputError("buchi2reach produces no certificate")
        _write(args.cert, cert.to_json() + "\n")
    emit(args, {"command": "reduce", "direction": args.direction, "states": h.n,
                "output": args.output})
    return EXIT_WIN


def cmd_example(args) -> int:
    try:
        fx = build_fixture(args.name, args.n)
    except ValueError as e:
        raise InputError(str(e)) from None
    if isinstance(fx, CounterSystem):
        loops = fx.shortest_loops()
        emit(args, {"command": "example", "name": args.name, "n": fx.n,
                    "shortest_loops": loops, "final_counters": fx.execute(loops)})
        return EXIT_WIN
    _write(args.out, dump_game(fx))
    return EXIT_WIN


def cmd_verify(args) -> int:
    g = load_game(args.game)
    path = args.strategy_opt or args.strategy
    if not path:
        raise InputError("verify needs a strategy file")
    sigma = load_strategy(path)
    if args.mode == "positive-safe" and g.safe is None:
        raise InputError("positive-safe needs a game with a safe set")
    try:
        v = oracle.verify_witness(g, sigma, args.mode, p2_mem=args.p2_mem)
    except ValueError as e:
        raise InputError(str(e)) from None
    report = {"command": "verify", "mode": args.mode, "status": v.status}
    if v.detail:
        report["detail"] = v.detail
    if v.counter is not None and args.out:
        _write(args.out, dump_transducer(v.counter, 2))
        report["counter_strategy"] = args.out
    emit(args, report)
    return EXIT_WIN if v.verified else (EXIT_LOSE if v.status == "refuted" else EXIT_UNKNOWN)


def cmd_oracle(args) -> int:
    g = load_game(args.game)
    if args.min_memory:
        k, ans = oracle.minimal_memory(g, args.mode, args.p1_mem, args.cls, args.budget)
        report = {"command": "oracle", "mode": args.mode, "class": args.cls,
                  "verdict": ans.verdict, "minimal_memory": k, "diagnostics": ans.diagnostics}
    else:
        ans = oracle.brute_force_decide(g, args.mode, args.cls, args.p1_mem, args.p2_mem,
                                        args.budget)
        report = {"command": "oracle", "mode": args.mode, "class": args.cls,
                  "verdict": ans.verdict, "diagnostics": ans.diagnostics}
    if ans.win and args.out:
        _write(args.out, dump_transducer(ans.witness, 1, obs_labels(g)))
    emit(args, report)
    return EXIT_OF[ans.verdict]


def cmd_randgen(args) -> int:
    cfg = randgen.GenConfig(max_states=args.states, min_states=args.min_states or args.states,
                            actions1=args.actions1, actions2=args.actions2,
                            p1_obs=args.obs1, p2_obs=args.obs2, max_support=args.support,
                            blocks1=args.blocks1, blocks2=args.blocks2)
    try:
        games = randgen.corpus(args.seed, args.count, cfg)
    except ValueError as e:
        raise InputError(str(e)) from None
    if args.count == 1:
        _write(args.out, dump_game(games[0]))
        return EXIT_WIN
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    for i, g in enumerate(games):
        (out / f"game{i:04d}.game").write_text(dump_game(g))
    emit(args, {"command": "randgen", "seed": args.seed, "count": args.count,
                "directory": str(out)})
    return EXIT_WIN


COMPARE_ROWS = (
    ("fig1", None, "almost-sure"),
    ("fig1", None, "positive"),
    ("fig3", None, "almost-sure"),
    ("fig9", None, "almost-sure"),
    ("fig9", None, "positive"),
    ("Ln", 1, "positive"),
    ("Ln", 2, "positive"),
)
SIDE_LABEL = {("partial", "perfect"): "one-sided, player 2 perfect",
              ("perfect", "partial"): "one-sided, player 1 perfect",
              ("partial", "partial"): "two-sided",
              ("perfect", "perfect"): "perfect observation"}


def compare_rows(rows=COMPARE_ROWS, max_mem: int = 3, k_cap: int | None = None) -> list[dict]:
    out = []
    for name, n, mode in rows:
        g = build_fixture(name, n)
        label = name if n is None else f"{name[0]}{n}"
        ans, _, _ = solve_game(g, mode, k_cap=k_cap)
        k, _ = oracle.minimal_memory(g, mode, max_mem)
        row = {"fixture": label, "mode": mode,
               "side": SIDE_LABEL[(g.side.player1, g.side.player2)],
               "verdict": ans.verdict, "min_memory": k if k is not None else f">{max_mem}"}
        if g.side.player2 == "perfect":
            row["belief_memoryless_enough"] = not belief.belief_memoryless_insufficiency(g, mode)
            row["backends_agree"] = antichain.solve_symbolic(g, mode).verdict == ans.verdict
        else:
            row["memoryless_enough"] = k == 1
        out.append(row)
    return out


def cmd_compare(args) -> int:
    rows = COMPARE_ROWS
    if args.fixtures:
        want = set(args.fixtures)
        rows = tuple(r for r in rows if (r[0] if r[1] is None else f"{r[0][0]}{r[1]}") in want)
    emit(args, {"command": "compare", "rows": compare_rows(rows, args.max_mem, args.k_cap)})
    return EXIT_WIN


# ---------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="posg", description=__doc__.splitlines()[0])
    common = _Parser(add_help=False)
    common.add_argument("--report", choices=("text", "structured"), default="text")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", parents=[common], help="parse and check a .game file")
    s.add_argument("game")
    s.set_defaults(fn=cmd_validate)

    s = sub.add_parser("solve", parents=[common], help="decide a qualitative objective")
    s.add_argument("game")
    s.add_argument("--mode", choices=("almost-sure", "positive"), default="almost-sure")
    s.add_argument("--class", dest="cls", choices=("pure", "rand-invisible"), default="pure")
    s.add_argument("--backend", choices=("explicit", "antichain"), default="explicit")
    s.add_argument("--k-cap", type=int, default=counting.DEFAULT_K_CAP,
                   help="promotion threshold cap (env POSG_K_CAP, default 64)")
    s.add_argument("--budget", type=int, default=counting.DEFAULT_NODE_BUDGET)
    s.add_argument("--out", help="write the witness .strat here")
    s.add_argument("--witness-game", help="write the game the witness refers to, if different")
    s.set_defaults(fn=cmd_solve)

    s = sub.add_parser("reduce", parents=[common], help="transform a game")
    s.add_argument("direction", choices=("rand2pure", "pure2rand", "buchi2reach"))
    s.add_argument("input")
    s.add_argument("output")
    s.add_argument("--cert", help="write the reduction certificate (JSON)")
    s.add_argument("--buchi", help="comma-separated Buchi states (default: target)")
    s.set_defaults(fn=cmd_reduce)

    s = sub.add_parser("example", parents=[common], help="emit a built-in fixture")
    s.add_argument("name", choices=FIXTURES)
    s.add_argument("--n", type=int, help=f"size parameter for {', '.join(PARAMETERIZED)}")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_example)

    s = sub.add_parser("verify", parents=[common], help="check a witness strategy")
    s.add_argument("game")
    s.add_argument("strategy", nargs="?")
    s.add_argument("--strategy", dest="strategy_opt", metavar="STRAT")
    s.add_argument("--mode", choices=oracle.VERIFY_MODES, default="almost-sure")
    s.add_argument("--p2-mem", type=int, default=2)
    s.add_argument("--out", help="write a refuting player-2 strategy here")
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("oracle", parents=[common], help="bounded brute-force decision")
    s.add_argument("game")
    s.add_argument("--mode", choices=("almost-sure", "positive"), default="almost-sure")
    s.add_argument("--class", dest="cls", choices=("pure", "rand-invisible"), default="pure")
    s.add_argument("--p1-mem", type=int, default=2)
    s.add_argument("--p2-mem", type=int, default=1)
    s.add_argument("--budget", type=int, default=200_000)
    s.add_argument("--min-memory", action="store_true",
                   help="search memory sizes 1..p1-mem for the smallest witness")
    s.add_argument("--out")
    s.set_defaults(fn=cmd_oracle)

    s = sub.add_parser("randgen", parents=[common], help="generate seeded random games")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--states", type=int, default=4)
    s.add_argument("--min-states", type=int)
    s.add_argument("--actions1", type=int, default=2)
    s.add_argument("--actions2", type=int, default=2)
    s.add_argument("--obs1", choices=("perfect", "partial", "blind"), default="partial")
    s.add_argument("--obs2", choices=("perfect", "partial", "blind"), default="perfect")
    s.add_argument("--blocks1", type=int, help="exact number of player-1 observation blocks")
    s.add_argument("--blocks2", type=int, help="exact number of player-2 observation blocks")
    s.add_argument("--support", type=int, default=2, help="max successors per transition")
    s.add_argument("--out", help="file (count 1) or directory")
    s.set_defaults(fn=cmd_randgen)

    s = sub.add_parser("compare", parents=[common], help="fixture verdict/memory table")
    s.add_argument("--fixtures", nargs="*")
    s.add_argument("--max-mem", type=int, default=3)
    s.add_argument("--k-cap", type=int, default=counting.DEFAULT_K_CAP)
    s.set_defaults(fn=cmd_compare)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "k_cap", None) is not None and args.k_cap < 2:
        parser.error("--k-cap must be at least 2")
    try:
        return args.fn(args)
    except InputError as e:
        print(f"posg: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ScopeError as e:
        print(f"posg: {e}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as e:
        print(f"posg: budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
