import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from toricderived import noncomm as N
from toricderived import weights as W
from toricderived.errors import BoundaryError, ParseError, PreconditionError
from toricderived.fields import GF, QQ

F = GF(32003)


def test_constant_and_trivial_cocycles_pass():
    win = W.parse_window("-2..2", 3)
    theta = N.ThetaCocycle.from_constant(N.skew_matrix({(1, 2): 2, (1, 3): 3, (2, 3): 7}, 3, F), win, F)
    res = N.yb_check(theta)
    assert res.ok and res.checked == 4 ** 3
    assert N.yb_check(N.ThetaCocycle.trivial(3, win, F))


def test_perturbed_cocycle_fails_at_the_first_point():
    win = W.parse_window("0..1", 3)
    theta = N.ThetaCocycle.trivial(3, win, F).with_value(1, 2, (0, 0, 0), 2)
    res = N.yb_check(theta)
    assert not res.ok
    assert res.violation == (1, 2, 3, (0, 0, 0))
    assert res.to_json()["violation"] == [1, 2, 3, [0, 0, 0]]


def test_cocycle_lookup():
    win = W.parse_window("0..1", 2)
    theta = N.ThetaCocycle.from_constant([[1, 5], [Fraction(1, 5), 1]], win, QQ)
    assert theta(1, 2, (0, 0)) == 5 and theta(2, 1, (0, 0)) == Fraction(1, 5)
    assert theta(2, 2, (1, 1)) == 1
    with pytest.raises(BoundaryError):
        theta(1, 2, (2, 0))
    partial = N.ThetaCocycle(2, win, QQ, {(1, 2, (0, 0)): QQ(3)}, None)
    with pytest.raises(BoundaryError, match="not defined"):
        partial(1, 2, (1, 0))


def test_from_constant_rejects_non_skew():
    win = W.parse_window("0..1", 2)
    with pytest.raises(PreconditionError):
        N.ThetaCocycle.from_constant([[1, 2], [2, 1]], win, QQ)
    with pytest.raises(PreconditionError):
        N.ThetaCocycle.from_constant([[2, 1], [1, 1]], win, QQ)


def test_trivial_normalization_is_all_ones():
    theta = N.ThetaCocycle.trivial(3, W.parse_window("-2..2", 3), F)
    norm = N.normalize(theta)
    assert set(norm.a.values()) == {1}


def test_constant_rank_two_normalization():
    win = W.parse_window("-3..3", 2)
    theta = N.ThetaCocycle.from_constant([[1, 5], [Fraction(1, 5), 1]], win, QQ)
    norm = N.normalize(theta)
    for p in win.points():
        assert norm(1, p) == 1
        assert norm(2, p) == Fraction(5) ** p[0]
    assert N.verify_commutation(theta, norm)
    with pytest.raises(BoundaryError):
        norm(2, (4, 0))


@pytest.mark.parametrize("field", [QQ, F])
@pytest.mark.parametrize("n,window", [(2, "-2..2"), (3, "-1..1"), (4, "0..1")])
def test_random_cocycles_normalize(field, n, window):
    rng = random.Random(7)
    theta = N.random_yb_theta(n, window, field, rng)
    assert N.yb_check(theta)
    norm = N.normalize(theta)
    assert N.check_base_normalization(norm)
    assert N.check_recurrences(theta, norm)
    assert N.verify_commutation(theta, norm)


@settings(max_examples=25)
@given(st.integers(0, 10 ** 6), st.integers(2, 3))
def test_effective_theta_is_trivial(seed, n):
    theta = N.random_yb_theta(n, "-1..1", F, random.Random(seed))
    norm = N.normalize(theta)
    zero = W.zero(n)
    for p in theta.window.points():
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                if all(W.add(p, e) in theta.window for e in (zero, W.eps(i, n), W.eps(j, n))):
                    assert N.effective_theta(theta, norm, i, j, p) == 1


def test_non_yb_cocycle_cannot_be_normalized():
    theta = N.random_yb_theta(3, "-1..1", F, random.Random(1)).with_value(2, 3, (0, 0, 0), 11)
    assert not N.yb_check(theta)
    assert not N.verify_commutation(theta, N.normalize(theta))


def test_window_too_small():
    theta = N.ThetaCocycle.trivial(2, W.parse_window("1..2", 2), F)
    with pytest.raises(BoundaryError):
        N.normalize(theta)


def test_sort_word():
    twist = lambda i, j, p: F(3)
    assert N.canonical_word((0, 0), (2, 1)) == (1, 1, 2)
    assert N.sort_word((0, 0), (1, 1, 2), twist, F) == 1
    assert N.sort_word((0, 0), (2, 1), twist, F) == 3
    assert N.sort_word((0, 0), (2, 1, 1), twist, F) == 9


def test_composition_tables():
    theta = N.random_yb_theta(3, "-2..2", F, random.Random(3))
    norm = N.normalize(theta)
    inner = theta.window.interior(1)
    assert N.normalized_table(theta, norm) == N.commutative_table(3, inner, F)
    raw = N.composition_table(3, inner, theta, F)
    assert raw != N.commutative_table(3, inner, F)


def test_load_theta_constant(tmp_path):
    path = tmp_path / "t.json"
    path.write_text(json.dumps({"n": 2, "constant": [[1, 5], ["1/5", 1]], "window": "-1..1", "field": "Q"}))
    theta = N.load_theta(str(path))
    assert theta.field == QQ
    assert theta(2, 1, (0, 0)) == Fraction(1, 5)
    assert theta.window == W.parse_window("-1..1", 2)


def test_load_theta_values():
    data = {"n": 2, "values": [{"i": 2, "j": 1, "p": [0, 0], "value": 4}]}
    theta = N.load_theta(data, "0..0", QQ)
    assert theta(1, 2, (0, 0)) == Fraction(1, 4)


@pytest.mark.parametrize("data", [{"constant": [[1]]}, {"n": 0, "constant": []},
                                  {"n": 2, "constant": [[1, 2]]}, {"n": 2},
                                  {"n": 2, "values": [{"i": 1, "j": 2, "p": [0, 0]}]}])
def test_load_theta_errors(data):
    with pytest.raises(ParseError):
        N.load_theta(data, None, QQ)
