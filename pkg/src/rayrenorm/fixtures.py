"""Worked polynomials with hand-checked combinatorics.

Two maps get the full treatment: a cubic whose free critical value sits
at external angle 1/4, and a quartic with a superattracting fixed point
of local degree three.  Their gap/arc data below is exact and is what the
test suite freezes against.
"""
from __future__ import annotations

from fractions import Fraction as F

from .poly import Polynomial


def cubic() -> Polynomial:
    """z^3 + 3z + i: critical points +-i, only +i escapes."""
    return Polynomial((1j, 3, 0, 1))


def quartic() -> Polynomial:
    """z^4 - 6z^2 + 8z - 2: z=1 is a fixed critical point of local degree 3, -2 escapes."""
    return Polynomial((-2, 8, -6, 0, 1))


def connected_quadratic() -> Polynomial:
    """z^2 - 1 (basilica): nothing escapes."""
    return Polynomial((-1, 0, 1))


def cubic_one_escape() -> Polynomial:
    """z^3 - 3z - 3: critical point -1 is fixed, +1 escapes.

    Its escaping critical value has angle 1/2 on the boundary of the
    candidate gap, so the two-arc model does not apply; used as the
    negative fixture for model construction.
    """
    return Polynomial((-3, -3, 0, 1))


def cubic_both_escape() -> Polynomial:
    """z^3 - 3z + 5: both critical orbits escape, Cantor Julia set."""
    return Polynomial((5, -3, 0, 1))


# ---------------------------------------------------------------------------
# cubic: r=1, return degree m=2, D=3
# ---------------------------------------------------------------------------

CUBIC_ESCAPING_CRIT = 1j
CUBIC_BOUNDED_CRIT = -1j
CUBIC_POTENTIAL = 0.3144226210413106        # Green's function at +i
CUBIC_VALUE_ANGLE = F(1, 4)                  # angle of the ray through P(+i)
CUBIC_GAP = (F(1, 12), F(5, 12))             # crash pair bounding the gap
# Fundamental arcs in lift coordinates on [5/12, 17/12); labels are
# counterclockwise from the gap.
CUBIC_ARCS = ((F(17, 36), F(25, 36)), (F(29, 36), F(37, 36)))
CUBIC_TAU_STAR = F(1, 2)                     # the fixed angle carried by arc 0
CUBIC_LAMBDA_SPAN = (F(1, 2), F(1, 1))       # smallest closed arc holding the model set
CUBIC_MAIN_GAP = (F(0, 1), F(1, 2))          # widest complementary gap of the model set

# itinerary-map spot checks, angle -> value
CUBIC_P_VALUES = {
    F(5, 8): F(1, 3),
    F(0, 1): F(0, 1),
    F(2, 3): F(1, 2),
    F(5, 6): F(1, 2),
}

# depth-1 preimages of the free critical point and the ray pairs crashing there
CUBIC_DEPTH1_PINCH = (
    (0j, (F(1, 36), F(17, 36))),
    (1.7320508075688772j, (F(5, 36), F(13, 36))),
    (-1.7320508075688772j, (F(25, 36), F(29, 36))),
)

# the two rays sharing itinerary value 0 land together at i(1-sqrt 5)/2
CUBIC_FIBER_ZERO = (F(0, 1), F(1, 2))
CUBIC_FIBER_ZERO_LANDING = -0.6180339887498949j

# ---------------------------------------------------------------------------
# quartic: r=1, return degree m=3, D=4
# ---------------------------------------------------------------------------

QUARTIC_ESCAPING_CRIT = -2.0 + 0j
QUARTIC_BOUNDED_CRIT = 1.0 + 0j
QUARTIC_POTENTIAL = 0.8139379389285547       # Green's function at -2
QUARTIC_VALUE_ANGLE = F(1, 2)
QUARTIC_GAP = (F(3, 8), F(5, 8))
QUARTIC_ARCS = (
    (F(21, 32), F(27, 32)),
    (F(29, 32), F(35, 32)),
    (F(37, 32), F(43, 32)),
)
QUARTIC_TAU_STAR = F(2, 3)
QUARTIC_LAMBDA_SPAN = (F(2, 3), F(4, 3))
QUARTIC_MAIN_GAP = (F(1, 3), F(2, 3))

QUARTIC_P_VALUES = {
    F(2, 3): F(0, 1),
    F(1, 3): F(0, 1),
    F(0, 1): F(1, 2),
    F(15, 16): F(7, 18),
    F(3, 4): F(1, 6),
}

# rays 1/3 and 2/3 land together at the repelling fixed point near 0.4626;
# ray 0 lands alone at the rightmost fixed point near 1.4728
QUARTIC_FIBER_ZERO = (F(1, 3), F(2, 3))
QUARTIC_FIBER_ZERO_LANDING = 0.46259842297477427 + 0j
QUARTIC_RAY0_LANDING = 1.4728339089952545 + 0j
