"""Monic centered polynomials and escape-rate machinery.

The Green's function of the filled Julia set is computed with a
certified truncation bound, so callers can trust the reported
error_bound rather than a fixed iteration count.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, PrecisionError

# Beyond this modulus one more iterate certifies any tolerance we accept,
# while staying far from float overflow for degrees up to ~20.
_ESCAPE_CUT = 1e8


@dataclass(frozen=True)
class Polynomial:
    """Monic centered polynomial, coefficients listed from z^0 upward."""

    coeffs: tuple[complex, ...]

    def __post_init__(self) -> None:
        cs = tuple(complex(c) for c in self.coeffs)
        object.__setattr__(self, "coeffs", cs)
        if len(cs) < 3:
            raise ValueError("degree must be at least 2")
        if cs[-1] != 1:
            raise ValueError("polynomial must be monic")
        if cs[-2] != 0:
            raise ValueError("polynomial must be centered (zero z^{d-1} coefficient)")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        """Horner evaluation; works on scalars and numpy arrays alike."""
        w = z * 0 + self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            w = w * z + c
        return w

    def deriv(self, z):
        d = self.degree
        w = z * 0 + d * self.coeffs[-1]
        for k in range(d - 1, 0, -1):
            w = w * z + k * self.coeffs[k]
        return w

    def coeff_abs_sum(self) -> float:
        return sum(abs(c) for c in self.coeffs[:-1])


@dataclass
class OrbitResult:
    """Forward orbit z, P(z), ..., truncated if a value stops being finite."""

    points: list[complex]
    overflowed: bool

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def __iter__(self):
        return iter(self.points)


def eval_orbit(P: Polynomial, z: complex, n: int) -> OrbitResult:
    """First n+1 orbit points.  Overflow truncates and is flagged, never silent."""
    pts = [complex(z)]
    for _ in range(n):
        w = P(pts[-1])
        if not (math.isfinite(w.real) and math.isfinite(w.imag)):
            return OrbitResult(pts, True)
        pts.append(w)
    return OrbitResult(pts, False)


def escape_radius(P: Polynomial) -> float:
    """Every |z| larger than this escapes monotonically: max(2, 1 + sum |a_i|)."""
    return max(2.0, 1.0 + P.coeff_abs_sum())


@dataclass(frozen=True)
class GreenEstimate:
    value: float
    error_bound: float
    iterations: int
    escaped: bool


def green_potential(P: Polynomial, z: complex, tol: float = 1e-12,
                    budget: int = 2048) -> GreenEstimate:
    """Green's function of the filled Julia set with a certified tail bound.

    Once the orbit passes the escape cut the remaining series is bounded by
    C / (d^{n+1} |w_n|) with C = 4 max(1, sum |a_i|); we iterate (at most a
    couple more steps) until that bound drops below tol.
    """
    d = P.degree
    C = 4.0 * max(1.0, P.coeff_abs_sum())
    w = complex(z)
    for n in range(budget + 1):
        a = abs(w)
        if not math.isfinite(a):
            raise PrecisionError("orbit overflowed before the tail bound closed")
        if a > _ESCAPE_CUT:
            bound = C / (float(d) ** (n + 1) * a)
            if bound <= tol or a > 1e60:
                return GreenEstimate(math.log(a) / float(d) ** n, bound, n, True)
        if n == budget:
            break
        w = P(w)
    return GreenEstimate(0.0, 0.0, budget, False)


def external_angle(P: Polynomial, z: complex, tol: float = 1e-12,
                   budget: int = 2048) -> float:
    """Argument of the Boettcher coordinate, in turns in [0, 1).

    Accumulates arg(P(w)/w^d) along the orbit with a branch guard; each
    term must stay strictly inside (-pi/2, pi/2), which holds whenever the
    orbit is comfortably outside the escape radius.  Points too close to
    the filled Julia set raise PrecisionError instead of guessing a branch.
    """
    d = P.degree
    asum = P.coeff_abs_sum()
    C = 4.0 * max(1.0, asum)
    w = complex(z)
    if w == 0:
        raise DomainError("external angle undefined at the origin")
    total = cmath.phase(w)
    for n in range(budget + 1):
        a = abs(w)
        if a > _ESCAPE_CUT:
            bound = C / (float(d) ** (n + 1) * a)
            if bound <= tol * 2 * math.pi:
                return (total / (2 * math.pi)) % 1.0
        if n == budget:
            break
        # P(w)/w^d evaluated without forming w^d, to dodge overflow.
        ratio = 1.0 + 0j
        for k, c in enumerate(P.coeffs[:-1]):
            if c != 0:
                ratio += c * w ** (k - d)
        delta = cmath.phase(ratio)
        if abs(delta) > math.pi / 2:
            raise PrecisionError("branch of the external angle is ambiguous here")
        total += delta / float(d) ** (n + 1)
        w = P(w)
        if not (math.isfinite(w.real) and math.isfinite(w.imag)):
            raise PrecisionError("orbit overflowed while accumulating the angle")
    raise DomainError("point did not escape within the iteration budget")


@dataclass(frozen=True)
class CriticalDatum:
    """A critical point with its escape rate; potential 0 means bounded orbit."""
    point: complex
    multiplicity: int
    potential: float

    @property
    def escapes(self) -> bool:
        return self.potential > 0.0


def critical_points(P: Polynomial, merge_tol: float = 1e-8) -> list[CriticalDatum]:
    """Critical points with multiplicities and escape rates, sorted by position."""
    return [CriticalDatum(z, mult, green_potential(P, z).value)
            for z, mult in _critical_roots(P, merge_tol)]


def _critical_roots(P: Polynomial, merge_tol: float = 1e-8) -> list[tuple[complex, int]]:
    """Roots of P' as (point, multiplicity), multiple roots merged by clustering."""
    d = P.degree
    deriv = [k * P.coeffs[k] for k in range(1, d + 1)]
    roots = np.roots(list(reversed(deriv)))
    # Newton polish helps simple roots only; multiple roots keep the eigenvalue.
    polished = []
    for r in roots:
        z = complex(r)
        for _ in range(3):
            f = _eval_list(deriv, z)
            fp = _eval_list([k * deriv[k] for k in range(1, len(deriv))], z)
            if abs(fp) < 1e-12:
                break
            step = f / fp
            if abs(step) > 0.5:
                break
            z -= step
        polished.append(z)
    clusters: list[list[complex]] = []
    for z in sorted(polished, key=lambda w: (w.real, w.imag)):
        for cl in clusters:
            if abs(cl[0] - z) < merge_tol * max(1.0, abs(cl[0])):
                cl.append(z)
                break
        else:
            clusters.append([z])
    out = []
    for cl in clusters:
        center = sum(cl) / len(cl)
        residual = abs(_eval_list(deriv, center))
        if residual > 1e-5 * max(1.0, abs(center)) ** (d - 1):
            raise PrecisionError(f"critical point did not converge, residual {residual:.3e}")
        out.append((center, len(cl)))
    out.sort(key=lambda t: (t[0].real, t[0].imag))
    return out


def _eval_list(coeffs: Sequence[complex], z: complex) -> complex:
    w = 0j
    for c in reversed(coeffs):
        w = w * z + c
    return w


def classify_criticals(P: Polynomial, tol: float = 1e-12, budget: int = 4096
                       ) -> tuple[list[CriticalDatum], list[CriticalDatum]]:
    """Split critical points into (escaping, bounded) by certified potential."""
    escaping, bounded = [], []
    for point, mult in _critical_roots(P):
        g = green_potential(P, point, tol=tol, budget=budget)
        datum = CriticalDatum(point, mult, g.value)
        (escaping if g.escaped else bounded).append(datum)
    return escaping, bounded


def poly_to_json_dict(P: Polynomial) -> dict:
    return {
        "degree": P.degree,
        "coeffs": [[c.real, c.imag] for c in P.coeffs],
    }


def poly_from_json_dict(data: dict) -> Polynomial:
    try:
        degree = int(data["degree"])
        pairs = data["coeffs"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed polynomial record: {exc}") from exc
    if len(pairs) != degree + 1:
        raise DomainError("coefficient count does not match the declared degree")
    coeffs = tuple(complex(float(re), float(im)) for re, im in pairs)
    if degree < 2:
        raise DomainError("degree must be at least 2")
    if coeffs[-1] != 1:
        raise DomainError("refusing a non-monic polynomial")
    if coeffs[-2] != 0:
        raise DomainError("refusing a non-centered polynomial")
    return Polynomial(coeffs)
