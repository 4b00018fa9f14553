import pytest
from hypothesis import given, strategies as st

from posgsolve.belief import solve_pure
from posgsolve.fixtures import fig1, fig3, fig9, fig10
from posgsolve.game import normalize
from posgsolve.textio import ParseError, dump_game, dump_transducer, parse_game, parse_transducer

from conftest import rng_game

FIG1_TEXT = """
states: q0 q1 q2 smiley
init: q0
actions1: a b
actions2: a b
obs1: {q0 q1 q2} {smiley}
obs2: perfect
target: smiley
delta:
  q0 * a -> q1
  q0 * b -> q2
  q1 a * -> { smiley: 1/2, q1: 1/2 }
  q1 b * -> q1
  q2 a * -> q2
  q2 b * -> { smiley: 1/2, q2: 1/2 }
  smiley * * -> smiley   // absorbing
"""


def test_parse_fig1_text_matches_fixture():
    g = parse_game(FIG1_TEXT)
    assert g.delta == fig1().delta
    assert g.obs1 == fig1().obs1


@pytest.mark.parametrize("make", [fig1, fig3, fig9, fig10])
def test_fixture_round_trip(make):
    g = make()
    assert parse_game(dump_game(g)) == g


@given(st.integers(0, 100_000))
def test_random_round_trip(seed):
    g = rng_game(seed, p2_obs="partial")
    assert parse_game(dump_game(g)) == g


def test_init_distribution_folds():
    text = FIG1_TEXT.replace("init: q0", "init: { q1: 1/2, q2: 1/2 }")
    g = parse_game(text)
    assert g.n == 5


@pytest.mark.parametrize("edit, fragment", [
    (("  q1 b * -> q1\n", ""), "missing"),
    (("obs1: {q0 q1 q2} {smiley}", "obs1: {q0 q1 q2} {smiley q2}"), "partition"),
    (("{ smiley: 1/2, q1: 1/2 }", "{ smiley: 1/2, q1: 1/4 }"), "sum"),
])
def test_parse_errors_positioned(edit, fragment):
    with pytest.raises(ParseError) as e:
        parse_game(FIG1_TEXT.replace(*edit))
    assert fragment in str(e.value)
    assert "line" in str(e.value)


def test_transducer_round_trip():
    w = solve_pure(normalize(fig1()), "almost-sure").witness
    t, player = parse_transducer(dump_transducer(w, 1))
    assert player == 1
    assert t.update == w.update and t.next == w.next and t.m0 == w.m0
