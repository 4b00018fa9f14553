import pytest
from hypothesis import given, settings, strategies as st

from posgsolve.belief import solve_pure
from posgsolve.fixtures import fig1, fig10
from posgsolve.game import validate
from posgsolve.oracle import verify_witness
from posgsolve.reductions import (ReductionCertificate, isomorphic, lift_strategy, pure_to_rand,
                                  rand_to_pure, transfer_strategy)
from posgsolve.transducer import constant

from conftest import reduction_disagreements, rng_game


def test_fig10_isomorphic():
    h, cert = pure_to_rand(fig1())
    assert isomorphic(h, fig10()) is not None
    assert validate(h) == []
    assert h.n == 4 * 3 + 1


def test_isomorphic_rejects_different_games():
    assert isomorphic(fig1(), fig10()) is None
    h, _ = pure_to_rand(fig1())
    assert isomorphic(h, rand_to_pure(fig1())[0]) is None


def test_rand_to_pure_shape(g1):
    r, cert = rand_to_pure(g1)
    assert r.actions1 == ("{a}", "{b}", "{a,b}")
    assert cert.action_map["{a,b}"] == ["a", "b"]
    assert validate(r) == []


def test_certificate_json_round_trip(g1):
    for _, cert in (pure_to_rand(g1), rand_to_pure(g1)):
        assert ReductionCertificate.from_json(cert.to_json()) == cert
    with pytest.raises(ValueError):
        ReductionCertificate.from_json('{"direction": "sideways"}')


def test_fig1_witness_transfers(g1):
    h, cert = pure_to_rand(g1)
    w = solve_pure(g1, "almost-sure").witness
    lifted = lift_strategy(cert, w)
    assert verify_witness(h, lifted, "almost-sure").verified
    back = transfer_strategy(cert, lifted)
    assert verify_witness(g1, back, "almost-sure").verified


def test_transfer_checks_alphabet(g1):
    _, cert = rand_to_pure(g1)
    with pytest.raises(ValueError):
        transfer_strategy(cert, constant(("a", "b"), 2, 0))


def test_subset_witness_becomes_uniform(g1):
    r, cert = rand_to_pure(g1)
    sigma = transfer_strategy(cert, constant(r.actions1, len(r.obs1), 2))
    assert not sigma.is_pure
    assert {a for a, _ in sigma.next[0][0]} == {0, 1}


@settings(max_examples=40)
@given(st.integers(0, 10**6))
def test_almost_sure_verdicts_commute(seed):
    g = rng_game(seed, min_states=3, max_states=3)
    assert reduction_disagreements(g, "almost-sure") == []


def test_doubling_does_not_preserve_positive_verdicts():
    # a coin flip over {a, b} matches itself with positive probability, so a
    # pure positive loss can become a randomized positive win
    g = rng_game(0, min_states=3, max_states=3)
    assert not solve_pure(g, "positive").win
    assert reduction_disagreements(g, "positive") == [
        "pure2rand: constructed game won while the source is lost"]
