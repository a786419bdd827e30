import cmath
import math
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from rayrenorm.errors import DomainError, PrecisionError
from rayrenorm.fixtures import (CUBIC_BOUNDED_CRIT, CUBIC_ESCAPING_CRIT,
                                CUBIC_POTENTIAL, CUBIC_VALUE_ANGLE,
                                QUARTIC_BOUNDED_CRIT, QUARTIC_ESCAPING_CRIT,
                                QUARTIC_POTENTIAL, QUARTIC_VALUE_ANGLE,
                                connected_quadratic, cubic, quartic)
from rayrenorm.poly import (Polynomial, classify_criticals, escape_radius,
                            external_angle, green_potential,
                            poly_from_json_dict, poly_to_json_dict)

CHEB = Polynomial((-2, 0, 1))
POWER3 = Polynomial((0, 0, 0, 1))

points = st.complex_numbers(min_magnitude=0, max_magnitude=8,
                            allow_nan=False, allow_infinity=False)


@given(points)
def test_green_of_power_map_is_log_abs(z):
    g = green_potential(POWER3, z)
    expect = math.log(abs(z)) if abs(z) > 1 else 0.0
    assert g.value == pytest.approx(expect, abs=1e-10)
    if abs(z) > 1.05:
        assert g.escaped
        assert g.error_bound < 1e-10


@given(points)
def test_green_of_chebyshev_matches_conjugacy(z):
    g = green_potential(CHEB, z)
    assert g.value == pytest.approx(oracles.cheb_green(z), abs=1e-9)


def test_green_zero_inside_filled_set():
    g = green_potential(CHEB, 0.5 + 0j)
    assert g.value == 0.0 and not g.escaped
    assert green_potential(connected_quadratic(), 0j).value == 0.0


@given(points, st.integers(min_value=2, max_value=5))
def test_green_functional_equation(z, d):
    coeffs = [0] * d + [1]
    coeffs[0] = 0.3 - 0.4j
    P = Polynomial(tuple(coeffs))
    gz = green_potential(P, z)
    gPz = green_potential(P, P(z))
    if gz.escaped:
        assert gPz.value == pytest.approx(d * gz.value, abs=1e-8, rel=1e-8)


def test_external_angle_power_map_is_plain_argument():
    for k in range(1, 12):
        tau = F(k, 12)
        z = 2.5 * cmath.exp(2j * cmath.pi * float(tau))
        assert external_angle(POWER3, z) == pytest.approx(float(tau), abs=1e-12)


def test_external_angle_chebyshev_via_zhukovsky():
    for k in range(1, 8):
        tau = F(k, 8)
        z = oracles.cheb_ray_point(tau, 0.9)
        assert external_angle(CHEB, z) == pytest.approx(float(tau), abs=1e-10)


def test_external_angle_semiconjugacy_on_fixture():
    P = cubic()
    z = 1.3 + 1.1j
    t = external_angle(P, z)
    t_img = external_angle(P, P(z))
    assert (3 * t - t_img) % 1.0 == pytest.approx(0.0, abs=1e-9) or \
        (3 * t - t_img) % 1.0 == pytest.approx(1.0, abs=1e-9)


def test_external_angle_rejects_bounded_points():
    with pytest.raises((DomainError, PrecisionError)):
        external_angle(CHEB, 0.3 + 0j)


def test_fixture_critical_classification():
    esc, bnd = classify_criticals(cubic())
    assert [c.point for c in esc] == [CUBIC_ESCAPING_CRIT]
    assert [c.point for c in bnd] == [CUBIC_BOUNDED_CRIT]
    assert esc[0].potential == pytest.approx(CUBIC_POTENTIAL, abs=1e-12)

    esc, bnd = classify_criticals(quartic())
    assert [c.point for c in esc] == [pytest.approx(QUARTIC_ESCAPING_CRIT)]
    assert [c.point for c in bnd] == [pytest.approx(QUARTIC_BOUNDED_CRIT)]
    assert esc[0].potential == pytest.approx(QUARTIC_POTENTIAL, abs=1e-12)
    assert bnd[0].multiplicity == 2


def test_fixture_value_angles():
    P = cubic()
    theta = external_angle(P, P(CUBIC_ESCAPING_CRIT))
    assert theta == pytest.approx(float(CUBIC_VALUE_ANGLE), abs=1e-10)
    Q = quartic()
    theta = external_angle(Q, Q(QUARTIC_ESCAPING_CRIT))
    assert theta == pytest.approx(float(QUARTIC_VALUE_ANGLE), abs=1e-10)


def test_escape_radius_bounds_iteration():
    P = cubic()
    R = escape_radius(P)
    assert R >= 2.0
    z = R + 0.1
    assert abs(P(z)) > abs(z)


def test_json_round_trip():
    for P in (cubic(), quartic(), CHEB):
        Q = poly_from_json_dict(poly_to_json_dict(P))
        assert Q.coeffs == P.coeffs


def test_json_validation():
    good = poly_to_json_dict(cubic())
    bad_lead = dict(good, coeffs=[[0, 1], [3, 0], [0, 0], [2, 0]])
    with pytest.raises(DomainError):
        poly_from_json_dict(bad_lead)
    bad_center = dict(good, coeffs=[[0, 1], [3, 0], [1, 0], [1, 0]])
    with pytest.raises(DomainError):
        poly_from_json_dict(bad_center)
    with pytest.raises(DomainError):
        poly_from_json_dict({"degree": 1, "coeffs": [[0, 0], [1, 0]]})
    with pytest.raises(DomainError):
        poly_from_json_dict({"coeffs": [[0, 0]]})


def test_degree_mismatch_rejected():
    good = poly_to_json_dict(cubic())
    with pytest.raises(DomainError):
        poly_from_json_dict(dict(good, degree=4))
