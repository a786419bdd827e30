"""Independent recomputations used to pin library results.

Everything here works from different primitives than the package:
closed-form conjugacies for the two solvable maps, exact Fraction
interval arithmetic on the circle, and a pixel flood fill for
connectivity.  Agreement with the library is then evidence rather
than the library agreeing with itself.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np

TWO_PI = 2.0 * math.pi


def power_ray_point(tau: Fraction, b: float) -> complex:
    """Exact ray of z^d: straight radial line, potential log|z|."""
    return cmath.exp(b + TWO_PI * 1j * float(tau))


def cheb_ray_point(tau: Fraction, b: float) -> complex:
    """Exact ray of z^2 - 2 through the Zhukovsky map w + 1/w."""
    w = cmath.exp(b + TWO_PI * 1j * float(tau))
    return w + 1.0 / w


def cheb_green(z: complex) -> float:
    """Green's function of z^2 - 2: log|w| at the outer Zhukovsky root."""
    s = cmath.sqrt(z * z - 4.0)
    w = (z + s) / 2.0
    if abs(w) < 1.0:
        w = (z - s) / 2.0
    return max(0.0, math.log(abs(w)))


# ---------------------------------------------------------------------------
# exact circle-set arithmetic: closed finite unions of arcs in [0, 1]
# ---------------------------------------------------------------------------

Arc = tuple[Fraction, Fraction]
ONE = Fraction(1)


def normalize(arcs: list[Arc]) -> list[Arc]:
    """Sorted disjoint closed arcs within [0, 1], wrapped input split at 0.

    Input arcs may sit in lift coordinates (hi > 1) as long as each is
    shorter than a full turn.
    """
    flat: list[Arc] = []
    for lo, hi in arcs:
        lo, hi = Fraction(lo), Fraction(hi)
        shift = lo - (lo % ONE)
        lo, hi = lo - shift, hi - shift
        if hi <= ONE:
            flat.append((lo, hi))
        else:
            flat.append((lo, ONE))
            flat.append((Fraction(0), hi - ONE))
    flat.sort()
    merged: list[Arc] = []
    for lo, hi in flat:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def sigma_preimage(arcs: list[Arc], D: int) -> list[Arc]:
    """Preimage of a normalized closed set under t -> D t mod 1."""
    out: list[Arc] = []
    for lo, hi in arcs:
        for k in range(D):
            out.append(((lo + k) / D, (hi + k) / D))
    return normalize(out)


def intersect(a: list[Arc], b: list[Arc]) -> list[Arc]:
    out: list[Arc] = []
    for alo, ahi in a:
        for blo, bhi in b:
            lo, hi = max(alo, blo), min(ahi, bhi)
            if lo <= hi:
                out.append((lo, hi))
    return normalize(out)


def total_length(arcs: list[Arc]) -> Fraction:
    return sum((hi - lo for lo, hi in arcs), Fraction(0))


def level_cover(arcs_mod1: list[Arc], D: int, n: int) -> list[Arc]:
    """Angles whose first n iterates under x D stay on the closed arcs."""
    base = normalize(arcs_mod1)
    cover = base
    for _ in range(n):
        cover = intersect(base, sigma_preimage(cover, D))
    return cover


def holes(arcs: list[Arc]) -> list[tuple[Fraction, Fraction]]:
    """Open complement components as (start, width), start in [0, 1)."""
    if not arcs:
        return [(Fraction(0), ONE)]
    out: list[tuple[Fraction, Fraction]] = []
    for (_, hi), (lo2, _) in zip(arcs, arcs[1:]):
        if hi < lo2:
            out.append((hi, lo2 - hi))
    if not (arcs[0][0] == 0 and arcs[-1][1] == ONE):
        width = (arcs[0][0] - arcs[-1][1]) % ONE
        if width:
            out.append((arcs[-1][1] % ONE, width))
    return sorted(out)


def contains(arcs: list[Arc], t: Fraction) -> bool:
    t = t % ONE
    # a set split at 0 carries membership of the seam on both parts
    return any(lo <= t <= hi for lo, hi in arcs) or (
        t == 0 and arcs[-1][1] == ONE)


def brute_member(arcs_mod1: list[Arc], D: int, t: Fraction
                 ) -> tuple[bool, int]:
    """Orbit test with closed containment.

    Returns (True, orbit length) for members, else (False, first step
    whose iterate falls off the arcs).
    """
    base = normalize(arcs_mod1)
    seen: set[Fraction] = set()
    x = t % ONE
    step = 0
    while x not in seen:
        if not contains(base, x):
            return False, step
        seen.add(x)
        x = (x * D) % ONE
        step += 1
    return True, step


# ---------------------------------------------------------------------------
# direct orbit iteration, no potential machinery involved
# ---------------------------------------------------------------------------

def escape_steps(P, z0: complex, radius: float = 1e6, budget: int = 400
                 ) -> int | None:
    """Steps until |orbit| exceeds radius, or None if it never does."""
    coeffs_desc = list(P.coeffs[::-1])
    z = complex(z0)
    for k in range(budget):
        if abs(z) > radius:
            return k
        z = complex(np.polyval(coeffs_desc, z))
    return None


def fixed_points(P) -> np.ndarray:
    """All roots of P(z) - z, straight from companion-matrix roots."""
    shifted = list(P.coeffs)
    shifted[1] = shifted[1] - 1
    return np.roots(list(reversed(shifted)))
