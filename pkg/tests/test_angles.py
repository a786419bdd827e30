from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rayrenorm.angles import (SIDE_LEFT, SIDE_NONE, SIDE_RIGHT, Angle,
                              angle_orbit, as_fraction, circ_dist,
                              in_open_arc, sigma, sorted_unique, wrap)

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=10 ** 4)
degrees = st.integers(min_value=2, max_value=9)


@given(rationals)
def test_wrap_range_and_idempotence(t):
    w = wrap(t)
    assert 0 <= w < 1
    assert wrap(w) == w
    assert (t - w) % 1 == 0


@given(degrees, rationals)
def test_sigma_is_multiplication_mod_one(d, t):
    assert sigma(d, t) == (d * t) % 1


@given(degrees, degrees, rationals)
def test_sigma_composes_multiplicatively(d, e, t):
    assert sigma(d, sigma(e, t)) == sigma(d * e, t)


def test_sigma_rejects_low_degree():
    with pytest.raises(ValueError):
        sigma(1, F(1, 3))


@given(rationals, rationals)
def test_circ_dist_symmetric_bounded(a, b):
    v = circ_dist(a, b)
    assert v == circ_dist(b, a)
    assert 0 <= v <= F(1, 2)
    assert (v == 0) == (wrap(a) == wrap(b))


@given(rationals, rationals, rationals)
def test_circ_dist_triangle(a, b, c):
    assert circ_dist(a, c) <= circ_dist(a, b) + circ_dist(b, c)


def test_in_open_arc_wrapping():
    assert in_open_arc(F(1, 12), F(11, 12), F(1, 6))
    assert not in_open_arc(F(11, 12), F(11, 12), F(1, 6))
    assert not in_open_arc(F(1, 6), F(11, 12), F(1, 6))
    assert not in_open_arc(F(1, 2), F(11, 12), F(1, 6))


@given(degrees, rationals)
def test_angle_orbit_shape(d, t):
    pre, cyc = angle_orbit(d, t)
    assert cyc, "every rational orbit closes"
    walk = pre + cyc
    for a, b in zip(walk, walk[1:]):
        assert sigma(d, a) == b
    assert sigma(d, cyc[-1]) == cyc[0]
    assert len(set(walk)) == len(walk)


def test_angle_orbit_known():
    pre, cyc = angle_orbit(2, F(1, 6))
    assert pre == [F(1, 6)]
    assert cyc == [F(1, 3), F(2, 3)]


def test_parse_round_trip():
    for text in ("1/4", "5/8:left", "0/1", "7/12:right"):
        assert str(Angle.parse(text)) == ("0/1" if text == "0/1" else text)


def test_parse_rejects_decimals_and_garbage():
    for bad in ("0.25", ".5", "1.0/2", "x/y", "1/0"):
        with pytest.raises(ValueError):
            Angle.parse(bad)


def test_parse_rejects_unknown_side():
    with pytest.raises(ValueError):
        Angle.parse("1/4:up")


def test_angle_normalizes_turns():
    assert Angle(F(5, 4)).turns == F(1, 4)
    assert Angle(F(-1, 4)).turns == F(3, 4)
    a = Angle(F(3, 8), SIDE_LEFT)
    assert a.tagged and a.untagged() == Angle(F(3, 8))
    assert Angle(F(3, 8)).side == SIDE_NONE
    assert Angle(F(1, 2), SIDE_RIGHT).numerator == 1


def test_as_fraction_accepts_mixed():
    assert as_fraction(Angle(F(1, 3), SIDE_LEFT)) == F(1, 3)
    assert as_fraction(F(7, 3)) == F(1, 3)
    assert as_fraction(2) == 0


def test_sorted_unique():
    assert sorted_unique([F(1, 2), F(1, 4), F(1, 2)]) == [F(1, 4), F(1, 2)]
