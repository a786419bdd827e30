"""Exact circle arithmetic for external angles.

Angles are rational turns in [0, 1).  An angle may carry a side tag
("left" or "right") marking a one-sided limit; the tag matters only at
angles whose ray is non-smooth, everywhere else it is ignored.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

SIDE_NONE = "none"
SIDE_LEFT = "left"
SIDE_RIGHT = "right"
SIDES = (SIDE_NONE, SIDE_LEFT, SIDE_RIGHT)


def wrap(t: Fraction) -> Fraction:
    """Reduce a rational number of turns into [0, 1)."""
    return t % 1


def sigma(d: int, t: Fraction) -> Fraction:
    """Angle action of z -> z^d: multiplication by d mod 1."""
    if d < 2:
        raise ValueError("degree must be at least 2")
    return (d * t) % 1


def circ_dist(a: Fraction, b: Fraction) -> Fraction:
    """Shorter arc length between two angles."""
    w = (a - b) % 1
    return min(w, 1 - w)


def in_open_arc(t: Fraction, lo: Fraction, hi: Fraction) -> bool:
    """Is t strictly inside the counterclockwise open arc from lo to hi?"""
    return (t - lo) % 1 > 0 and (t - lo) % 1 < (hi - lo) % 1


def angle_orbit(d: int, t: Fraction) -> tuple[list[Fraction], list[Fraction]]:
    """Forward orbit of t under multiplication by d, split as (preperiod, cycle).

    Terminates for every rational t: the orbit of p/q stays on the grid
    with denominator q.
    """
    t = wrap(t)
    seen: dict[Fraction, int] = {}
    trail: list[Fraction] = []
    x = t
    while x not in seen:
        seen[x] = len(trail)
        trail.append(x)
        x = sigma(d, x)
    k = seen[x]
    return trail[:k], trail[k:]


@dataclass(frozen=True)
class Angle:
    """A rational external angle with an optional one-sided tag."""

    turns: Fraction
    side: str = SIDE_NONE

    def __post_init__(self) -> None:
        object.__setattr__(self, "turns", wrap(Fraction(self.turns)))
        if self.side not in SIDES:
            raise ValueError(f"unknown side tag {self.side!r}")

    @property
    def numerator(self) -> int:
        return self.turns.numerator

    @property
    def denominator(self) -> int:
        return self.turns.denominator

    @property
    def tagged(self) -> bool:
        return self.side != SIDE_NONE

    def untagged(self) -> "Angle":
        return Angle(self.turns)

    def __str__(self) -> str:
        base = f"{self.turns.numerator}/{self.turns.denominator}"
        return base if self.side == SIDE_NONE else f"{base}:{self.side}"

    @staticmethod
    def parse(text: str) -> "Angle":
        """Parse "p/q" or "p/q:left" / "p/q:right".  Decimal input is rejected."""
        body, _, tag = text.strip().partition(":")
        if "." in body:
            raise ValueError("decimal angles are not accepted; pass an exact rational p/q")
        try:
            turns = Fraction(body)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse angle {text!r}") from exc
        side = tag.strip() if tag else SIDE_NONE
        return Angle(turns, side)


def as_fraction(t: "Angle | Fraction | int") -> Fraction:
    if isinstance(t, Angle):
        return t.turns
    return wrap(Fraction(t))


def sorted_unique(angles: Iterable[Fraction]) -> list[Fraction]:
    return sorted(set(angles))
