import json

import pytest

from posgsolve.cli import main
from posgsolve.fixtures import fig1
from posgsolve.reductions import ReductionCertificate
from posgsolve.textio import dump_game, parse_game, parse_transducer


@pytest.fixture
def fig1_file(tmp_path):
    p = tmp_path / "fig1.game"
    p.write_text(dump_game(fig1()))
    return p


def test_validate(fig1_file, capsys):
    assert main(["validate", str(fig1_file)]) == 0
    assert "valid: True" in capsys.readouterr().out


def test_validate_bad_input(tmp_path, capsys):
    p = tmp_path / "bad.game"
    p.write_text("states: q0\ninit: q9\n")
    assert main(["validate", str(p)]) == 3
    assert "error" in capsys.readouterr().err


def test_usage_error_exits_3():
    with pytest.raises(SystemExit) as e:
        main(["solve"])
    assert e.value.code == 3


def test_solve_writes_verifiable_witness(fig1_file, tmp_path, capsys):
    out = tmp_path / "w.strat"
    assert main(["solve", str(fig1_file), "--mode", "almost-sure", "--out", str(out)]) == 0
    t, player = parse_transducer(out.read_text())
    assert player == 1 and t.size >= 2
    capsys.readouterr()
    assert main(["verify", str(fig1_file), str(out), "--mode", "almost-sure"]) == 0


def test_structured_report(fig1_file, capsys):
    assert main(["solve", str(fig1_file), "--backend", "antichain", "--report", "structured"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["schema"] == "posg-report/1"
    assert rep["verdict"] == "win"
    assert rep["diagnostics"]["backend"] == "antichain"


def test_lose_exit_code(tmp_path):
    p = tmp_path / "stuck.game"
    p.write_text("states: x t\ninit: x\nactions1: a\nactions2: b\nobs1: perfect\n"
                 "obs2: perfect\ntarget: t\ndelta:\n  x * * -> x\n  t * * -> t\n")
    assert main(["solve", str(p)]) == 1


def test_verify_refutation_writes_counter(fig1_file, tmp_path, capsys):
    s = tmp_path / "a.strat"
    s.write_text("strategy: player1\nactions: a b\nobservations: 2\nmemory: m0\ninit: m0\n"
                 "table:\n  m0 0 -> a / m0\n  m0 1 -> a / m0\n")
    c = tmp_path / "c.strat"
    assert main(["verify", str(fig1_file), "--strategy", str(s), "--out", str(c)]) == 1
    _, player = parse_transducer(c.read_text())
    assert player == 2


def test_two_sided_refused(tmp_path, capsys):
    p = tmp_path / "two.game"
    assert main(["randgen", "--seed", "3", "--obs1", "blind", "--obs2", "blind",
                 "--out", str(p)]) == 0
    assert main(["solve", str(p)]) == 3
    assert "refused" in capsys.readouterr().out


def test_randgen_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["randgen", "--seed", "11", "--count", "3", "--out", str(d)]) == 0
    for f in sorted(a.iterdir()):
        assert f.read_text() == (b / f.name).read_text()
        parse_game(f.read_text())


def test_randgen_bad_blocks(tmp_path):
    assert main(["randgen", "--states", "2", "--blocks1", "5", "--out",
                 str(tmp_path / "x.game")]) == 3


def test_reduce_pure2rand_with_certificate(fig1_file, tmp_path):
    out, cert = tmp_path / "h.game", tmp_path / "h.json"
    assert main(["reduce", "pure2rand", str(fig1_file), str(out), "--cert", str(cert)]) == 0
    assert parse_game(out.read_text()).n == 13
    assert ReductionCertificate.from_json(cert.read_text()).direction == "pure2rand"


def test_reduce_buchi(fig1_file, tmp_path):
    out = tmp_path / "r.game"
    assert main(["reduce", "buchi2reach", str(fig1_file), str(out), "--buchi", "q1"]) == 0
    assert parse_game(out.read_text()).n == 5
    assert main(["reduce", "buchi2reach", str(fig1_file), str(out), "--buchi", "nope"]) == 3


def test_example_and_counter_system(tmp_path, capsys):
    out = tmp_path / "l1.game"
    assert main(["example", "Ln", "--n", "1", "--out", str(out)]) == 0
    assert "q_I" in out.read_text()
    assert main(["example", "Cn", "--n", "1", "--report", "structured"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert "shortest_loops" in rep
    assert main(["example", "Ln"]) == 3


def test_counting_solve_with_witness_game(tmp_path, capsys):
    src = tmp_path / "fig3.game"
    assert main(["example", "fig3", "--out", str(src)]) == 0
    w, wg = tmp_path / "w.strat", tmp_path / "wg.game"
    assert main(["solve", str(src), "--mode", "positive", "--k-cap", "16",
                 "--out", str(w), "--witness-game", str(wg)]) == 0
    assert main(["verify", str(wg), str(w), "--mode", "positive"]) == 0


def test_oracle_min_memory(fig1_file, capsys):
    assert main(["oracle", str(fig1_file), "--min-memory", "--p1-mem", "3",
                 "--report", "structured"]) == 0
    assert json.loads(capsys.readouterr().out)["minimal_memory"] == 2


def test_compare_subset(capsys):
    assert main(["compare", "--fixtures", "fig1", "--report", "structured"]) == 0
    rows = json.loads(capsys.readouterr().out)["rows"]
    assert {r["mode"] for r in rows} == {"almost-sure", "positive"}
    assert all(r["verdict"] == "win" and r["min_memory"] == 2 for r in rows)
    assert all(r["backends_agree"] for r in rows)
