import cmath
import math
from fractions import Fraction as F

import pytest

import oracles
from rayrenorm.angles import Angle, sigma
from rayrenorm.errors import DomainError
from rayrenorm.fixtures import (CUBIC_GAP, QUARTIC_FIBER_ZERO,
                                QUARTIC_FIBER_ZERO_LANDING,
                                QUARTIC_RAY0_LANDING, cubic, quartic)
from rayrenorm.poly import Polynomial, green_potential
from rayrenorm.rays import (STATUS_CRASHED, STATUS_LANDED, STATUS_TRUNCATED,
                            equipotential_component, trace_ray,
                            trace_to_json_dict)

CHEB = Polynomial((-2, 0, 1))
POWER3 = Polynomial((0, 0, 0, 1))


def test_power_map_rays_are_radial():
    for k in (1, 3, 5, 11):
        tau = Angle(F(k, 12))
        tr = trace_ray(POWER3, tau, b_start=1.5, b_end=1e-4)
        assert tr.samples[0][0] >= tr.samples[-1][0]
        for b, z in tr.samples:
            assert abs(z - oracles.power_ray_point(tau.turns, b)) < 1e-9


def test_chebyshev_rays_match_zhukovsky():
    # periodic non-dyadic angles: their orbits stay clear of the critical
    # point, where ladder conditioning would degrade
    for num, den in ((1, 7), (2, 7), (3, 7), (1, 3), (2, 5)):
        tau = Angle(F(num, den))
        tr = trace_ray(CHEB, tau, b_start=2.0, b_end=1e-3)
        for b, z in tr.samples:
            assert abs(z - oracles.cheb_ray_point(tau.turns, b)) < 1e-9


def test_chebyshev_landing_at_interior_cycle():
    # the segment point 2 cos(2 pi t) is periodic for periodic t
    for num, den in ((1, 3), (1, 5)):
        tr = trace_ray(CHEB, Angle(F(num, den)), b_start=2.0, b_end=1e-9)
        assert tr.status == STATUS_LANDED
        z, diam = tr.landing
        assert abs(z - 2 * math.cos(2 * math.pi * num / den)) < 1e-6
        assert diam < 1e-6


def test_dyadic_chebyshev_ray_refused_not_wrong():
    # the image ray of 3/8 lands at the critical point, which starves the
    # ladder of precision; the tracer must refuse rather than fabricate
    from rayrenorm.errors import PrecisionError
    with pytest.raises(PrecisionError):
        trace_ray(CHEB, Angle(F(3, 8)), b_start=2.0, b_end=1e-3)


def test_samples_carry_decreasing_potential_and_correct_u():
    P = cubic()
    tr = trace_ray(P, Angle(F(7, 13)), b_start=1.8, b_end=1e-5)
    bs = [b for b, _ in tr.samples]
    assert bs == sorted(bs, reverse=True)
    for b, z in tr.samples[::7]:
        assert green_potential(P, z).value == pytest.approx(b, rel=1e-8)


def test_push_forward_on_fixture():
    P = quartic()
    tau = Angle(F(5, 9))
    probe = 0.31
    tr = trace_ray(P, tau, b_start=2.0, b_end=probe / 1.5,
                   extra_levels=((0, probe),))
    img = trace_ray(P, Angle(sigma(4, tau.turns)), b_start=max(2.0, 4 * probe * 1.3),
                    b_end=4 * probe / 1.5, extra_levels=((0, 4 * probe),))
    z = next(zz for k, b, zz in tr.nest_crossings if k == 0 and abs(b - probe) < 1e-12)
    w = next(zz for k, b, zz in img.nest_crossings if k == 0 and abs(b - 4 * probe) < 1e-12)
    assert abs(P(z) - w) < 1e-6


def test_crash_detected_at_critical_point():
    P = cubic()
    lo, hi = CUBIC_GAP
    for t in (lo, hi):
        tr = trace_ray(P, Angle(t), b_start=1.5, b_end=1e-6)
        assert tr.status == STATUS_CRASHED
        b_c, z_c, n = tr.crash
        assert n == 0
        assert abs(z_c - 1j) < 1e-8
        assert green_potential(P, z_c).value == pytest.approx(b_c, abs=1e-9)


def test_crash_detected_at_depth_one():
    from rayrenorm.fixtures import CUBIC_DEPTH1_PINCH
    P = cubic()
    for point, pair in CUBIC_DEPTH1_PINCH:
        tr = trace_ray(P, Angle(pair[0]), b_start=1.5, b_end=1e-6)
        assert tr.status == STATUS_CRASHED
        b_c, z_c, n = tr.crash
        assert n == 1
        assert abs(z_c - point) < 1e-8
        assert abs(P(z_c) - 1j) < 1e-8


def test_tagged_crash_angle_continues_past_crash():
    P = cubic()
    lo, _ = CUBIC_GAP
    tr = trace_ray(P, Angle(lo, "left"), b_start=1.5, b_end=1e-4)
    assert tr.status in (STATUS_LANDED, STATUS_TRUNCATED)
    assert min(b for b, _ in tr.samples) < 1e-3


def test_crash_above_start_rejected():
    P = cubic()
    with pytest.raises(DomainError):
        trace_ray(P, Angle(CUBIC_GAP[0]), b_start=0.05, b_end=1e-4)


def test_quartic_fiber_rays_land_together():
    P = quartic()
    zs = []
    for t in QUARTIC_FIBER_ZERO:
        tr = trace_ray(P, Angle(t), b_start=2.0, b_end=1e-9)
        assert tr.status == STATUS_LANDED
        zs.append(tr.landing[0])
    assert abs(zs[0] - zs[1]) < 1e-4
    assert abs(zs[0] - QUARTIC_FIBER_ZERO_LANDING) < 1e-4


def test_quartic_zero_ray_lands_alone():
    P = quartic()
    tr = trace_ray(P, Angle(F(0)), b_start=2.0, b_end=1e-9)
    assert tr.status == STATUS_LANDED
    assert abs(tr.landing[0] - QUARTIC_RAY0_LANDING) < 1e-4
    # independent root find: the landing must be one of the fixed points
    roots = oracles.fixed_points(P)
    assert min(abs(tr.landing[0] - r) for r in roots) < 1e-6


def test_truncated_when_window_too_shallow():
    P = cubic()
    tr = trace_ray(P, Angle(F(1, 7)), b_start=1.5, b_end=2e-2)
    assert tr.status == STATUS_TRUNCATED
    assert tr.landing is None


def test_equipotential_component_chebyshev():
    b = 0.8
    loop = equipotential_component(CHEB, b, seed=3.0 + 0j)
    assert len(loop) == 4096
    for z in loop[::97]:
        assert oracles.cheb_green(z) == pytest.approx(b, abs=1e-6)
    # closed and counterclockwise: winding of the tangent is one full turn
    area = 0.0
    for a, c in zip(loop, loop[1:] + loop[:1]):
        area += a.real * c.imag - c.real * a.imag
    assert area > 0


def test_equipotential_refuses_singular_level():
    P = cubic()
    u_crit = green_potential(P, 1j).value
    with pytest.raises(DomainError):
        equipotential_component(P, u_crit, seed=4.0 + 0j)


def test_trace_json_shape():
    P = cubic()
    tr = trace_ray(P, Angle(F(1, 4)), b_start=1.5, b_end=1e-4)
    d = trace_to_json_dict(tr)
    assert d["angle"] == "1/4"
    assert d["status"] == tr.status
    assert len(d["samples"]) == len(tr.samples)
    assert all(len(row) == 3 for row in d["samples"])
