"""Detection of the restriction of P to the nest around a bounded critical.

With at least one critical point escaping and at least one bounded, a
base potential b0 just below the lowest escape rate cuts the plane into
nest pieces.  W* is the piece of {u < b0} holding a bounded critical
point c0; the first return P^r sends the deeper piece W*1 (level b0/D,
D = d^r) properly onto W* with some degree m ≥ 2.  The rays that stop at
escaping (pre)critical points cut the circle of angles into the gap/arc
model analysed exactly in the itinerary module; everything here supplies
the numerical side: the nest polygons, the return degree, the crash-pair
angles, and the geometric membership verdict.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .angles import SIDE_LEFT, SIDE_NONE, SIDE_RIGHT, Angle, wrap
from .errors import (DomainError, ModelMismatch, NoBoundedCritical,
                     NoCriticalInCycle, NotDisconnected, PeriodBudgetExceeded,
                     PrecisionError, TheoremViolation)
from .pmap import BOUNDARY_UNCERTAIN, EXCLUDED, MEMBER, FundamentalArcs, \
    LambdaVerdict, level_arcs
from .poly import CriticalDatum, Polynomial, classify_criticals, \
    escape_radius, external_angle, green_potential
from .rays import (STATUS_CRASHED, crash_pair_data, equipotential_component,
                   rationalize, trace_ray)

_PIN_TOL = Fraction(1, 10 ** 9)  # exact angular margin for certain verdicts


@dataclass(frozen=True)
class CrashPair:
    """Angles of the two rays meeting at an escaping (pre)critical point.

    Both angles map to the same angle under σ_d; level is the preimage
    depth, so the meeting point has potential u(c)/d^level.
    """
    theta1: Angle
    theta2: Angle
    critical_point: complex
    level: int


@dataclass(frozen=True)
class Renormalization:
    r: int
    m: int
    D: int
    b0: float
    kf_address: tuple[int, ...]
    escaping: tuple[CriticalDatum, ...]
    interior_criticals: tuple[CriticalDatum, ...]
    crash_pairs: tuple[CrashPair, ...]


def choose_base_level(P: Polynomial, escaping: Sequence[CriticalDatum]) -> float:
    """Base potential below every escape rate, clear of their ladders.

    Starts at 0.7 of the lowest escape rate and nudges downward until the
    value keeps a relative margin of 1e-3 from every u(c)/d^k, k ≤ 60.
    """
    if not escaping:
        raise NotDisconnected("no escaping critical point, nothing to cut")
    d = P.degree
    b0 = 0.7 * min(c.potential for c in escaping)
    for _ in range(40):
        ok = True
        for c in escaping:
            lev = c.potential
            for _ in range(61):
                if abs(b0 - lev) < 1e-3 * b0:
                    ok = False
                    break
                lev /= d
                if lev < b0 / (2 * d):
                    break
            if not ok:
                break
        if ok:
            return b0
        b0 *= 0.99975
    raise PrecisionError("could not place a base level off the critical ladders")




def crash_angle_pair(P: Polynomial, crit: CriticalDatum) -> CrashPair:
    """The two ray angles that meet at the escaping critical point."""
    if not crit.escapes:
        raise DomainError("crash pair asked for a non-escaping critical point")
    for _, c, t1, t2 in crash_pair_data(P):
        if abs(c - crit.point) <= 1e-9 * max(1.0, abs(c)):
            return CrashPair(Angle(t1), Angle(t2), c, 0)
    raise PrecisionError("no crash pair resolved at the requested critical point")


# ---------------------------------------------------------------------------
# level-set geometry
# ---------------------------------------------------------------------------

class _Loop:
    """Closed polyline with vectorized containment and arclength queries."""

    __slots__ = ("points", "_a", "_b", "_acc")

    def __init__(self, points: Sequence[complex]):
        self.points = tuple(points)
        a = np.asarray(self.points, dtype=complex)
        self._a = a
        self._b = np.roll(a, -1)
        self._acc = np.concatenate([[0.0], np.cumsum(np.abs(self._b - a))])

    @property
    def length(self) -> float:
        return float(self._acc[-1])

    def contains(self, z: complex) -> bool:
        # even-odd rule over all edges at once
        ya, yb = self._a.imag, self._b.imag
        mask = (ya > z.imag) != (yb > z.imag)
        if not mask.any():
            return False
        t = (z.imag - ya[mask]) / (yb[mask] - ya[mask])
        xc = self._a.real[mask] + t * (self._b.real[mask] - self._a.real[mask])
        return bool(np.count_nonzero(z.real < xc) & 1)

    def position(self, z: complex) -> float:
        """Arclength coordinate of the nearest point on the loop."""
        seg = self._b - self._a
        den = np.maximum(np.abs(seg) ** 2, 1e-300)
        t = np.clip(((z - self._a).conjugate() * seg).real / den, 0.0, 1.0)
        proj = self._a + t * seg
        i = int(np.argmin(np.abs(z - proj)))
        return float(self._acc[i] + t[i] * (self._acc[i + 1] - self._acc[i]))


def _level_crossing_from(P: Polynomial, w: complex, beta: float) -> complex:
    """First point with u = beta on the segment from w toward +infinity."""
    span = escape_radius(P) + abs(w) + 1.0
    lo, hi = 0.0, None
    steps = 4096
    prev = 0.0
    for i in range(1, steps + 1):
        t = span * i / steps
        u = green_potential(P, w + t).value
        if u >= beta:
            lo, hi = prev, t
            break
        prev = t
    if hi is None:
        raise PrecisionError("no level crossing found toward infinity")
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if green_potential(P, w + mid).value >= beta:
            hi = mid
        else:
            lo = mid
    return w + hi


def _enclosing_loop(P: Polynomial, w: complex, beta: float,
                    n_points: int = 3072) -> _Loop:
    """Boundary polygon of the component of {u < beta} containing w."""
    seed = _level_crossing_from(P, w, beta)
    loop = _Loop(equipotential_component(P, beta, seed, n_points=n_points))
    if not loop.contains(w):
        raise PrecisionError("marched loop does not enclose the query point")
    return loop


def _preimages(P: Polynomial, w: complex) -> list[complex]:
    coeffs = list(P.coeffs)
    coeffs[0] = coeffs[0] - w
    roots = np.roots(list(reversed(coeffs)))
    return [complex(r) for r in roots]


def _cluster(points: Sequence[complex], tol: float) -> list[complex]:
    out: list[complex] = []
    for p in sorted(points, key=lambda w: (w.real, w.imag)):
        if not any(abs(p - q) <= tol for q in out):
            out.append(p)
    return out


def _chord_ladder(P: Polynomial, crit: CriticalDatum, max_depth: int
                  ) -> list[list[tuple[Fraction, Fraction]]]:
    """Crash chords of one escaping critical point, by preimage depth.

    Depth 0 is the crash pair of the critical point itself; depth j
    pairs the angle preimages of the depth j-1 chords by the precritical
    point their rays stop near.  Only simple precritical points are
    handled: each must catch exactly two rays.
    """
    d = P.degree
    pair0 = crash_angle_pair(P, crit)
    chords: list[list[tuple[Fraction, Fraction]]] = [
        [tuple(sorted((pair0.theta1.turns, pair0.theta2.turns)))]]
    precrit = [crit.point]
    for j in range(1, max_depth + 1):
        precrit = _cluster([q for w in precrit for q in _preimages(P, w)],
                           1e-7)
        level = crit.potential / d ** j
        cands: list[Fraction] = []
        for a, b in chords[-1]:
            for t in (a, b):
                for i in range(d):
                    cands.append(wrap(Fraction(t + i, d)))
        pairs = None
        for margin in (1.3, 1.1, 1.03):
            buckets: dict[int, list[Fraction]] = {}
            ok = True
            for t in cands:
                tr = trace_ray(P, Angle(t), b_start=2.0, b_end=level * margin)
                zend = tr.samples[-1][1]
                ranked = sorted((abs(zend - q), i)
                                for i, q in enumerate(precrit))
                if len(ranked) > 1 and ranked[0][0] > 0.25 * ranked[1][0]:
                    ok = False
                    break
                buckets.setdefault(ranked[0][1], []).append(t)
            if ok and all(len(ts) == 2 for ts in buckets.values()):
                pairs = [tuple(sorted(ts)) for ts in buckets.values()]
                break
        if pairs is None:
            raise ModelMismatch(
                f"could not pair the depth-{j} crash rays to simple "
                "precritical points")
        chords.append(sorted(pairs))
    return chords


def _check_laminar(chords: Sequence[tuple[Fraction, Fraction]]) -> None:
    for i, (a, b) in enumerate(chords):
        for c, e in chords[i + 1:]:
            if (a < c < b) != (a < e < b):
                raise PrecisionError("crash chords cross; pairing failed")


def _faces(chords: Sequence[tuple[Fraction, Fraction]]
           ) -> list[list[tuple[Fraction, Fraction]]]:
    """Complementary faces of a non-crossing chord family in the disk.

    Each face is returned as its list of circle arcs (start, end) with
    end possibly exceeding 1 to keep it above its start.  Walking ccw,
    an arc ends at a chord endpoint and the face continues at the other
    end of that chord.  Faces are ranked by their smallest arc start.
    """
    if not chords:
        return [[(Fraction(0), Fraction(1))]]
    partner: dict[Fraction, Fraction] = {}
    for a, b in chords:
        partner[a] = b
        partner[b] = a
    ends = sorted(partner)
    arcs: dict[Fraction, tuple[Fraction, Fraction]] = {}
    for i, e in enumerate(ends):
        nxt = ends[(i + 1) % len(ends)]
        arcs[e] = (e, nxt if nxt > e else nxt + 1)
    faces = []
    seen: set[Fraction] = set()
    for e in ends:
        if e in seen:
            continue
        face = []
        cur = e
        while cur not in seen:
            seen.add(cur)
            face.append(arcs[cur])
            cur = partner[wrap(arcs[cur][1])]
        faces.append(sorted(face))
    faces.sort(key=lambda f: f[0][0])
    return faces


def component_address(P: Polynomial, z: complex, b0: float, depth: int
                      ) -> tuple[int, ...]:
    """Canonical index of the level-set component of z, per level.

    Entry k is the index of the component of {u < b0/d^k} containing z.
    Components correspond to faces of the lamination spanned by the
    crash chords with stopping potential above the level, so they are
    ranked exactly by their smallest external angle; only the component
    of z itself is ever marched, to pick out its face by a test ray.
    The tuple is cut short at the first level with u(z) >= b0/d^k.
    """
    d = P.degree
    escaping, _ = classify_criticals(P)
    u_z = green_potential(P, z).value
    ladders = []
    for crit in escaping:
        depth_j = -1
        while crit.potential / d ** (depth_j + 1) > b0 / d ** depth:
            depth_j += 1
        if depth_j >= 0:
            ladders.append((crit, _chord_ladder(P, crit, depth_j)))
    address: list[int] = []
    for k in range(depth + 1):
        beta = b0 / d ** k
        if u_z >= beta:
            break
        active: list[tuple[Fraction, Fraction]] = []
        inactive_top = 0.0
        for crit, ladder in ladders:
            for j, row in enumerate(ladder):
                if crit.potential / d ** j > beta:
                    active.extend(row)
                else:
                    inactive_top = max(inactive_top, crit.potential / d ** j)
        _check_laminar(active)
        faces = _faces(active)
        if len(faces) == 1:
            address.append(0)
            continue
        # land the test rays below the level but above any remaining
        # crash potential
        b_land = 0.8 * beta
        if inactive_top >= b_land:
            b_land = math.sqrt(inactive_top * beta)
        loop = _enclosing_loop(P, z, beta)
        index = None
        for rank, face in enumerate(faces):
            arc = face[0]
            mid = wrap(Fraction(arc[0] + arc[1], 2))
            tr = trace_ray(P, Angle(mid), b_start=2.0, b_end=b_land)
            if tr.status == STATUS_CRASHED:
                mid = wrap(arc[0] + Fraction(arc[1] - arc[0], 4))
                tr = trace_ray(P, Angle(mid), b_start=2.0, b_end=b_land)
            if loop.contains(tr.samples[-1][1]):
                index = rank
                break
        if index is None:
            raise PrecisionError(
                "no face ray lands in the component of the query point")
        address.append(index)
    return tuple(address)


# ---------------------------------------------------------------------------
# building the renormalization
# ---------------------------------------------------------------------------

def _iterated_poly(P: Polynomial, r: int) -> np.poly1d:
    q = np.poly1d(list(reversed([complex(c) for c in P.coeffs])))
    out = q
    for _ in range(r - 1):
        out = np.poly1d(q(out))
    return out


def build_renormalization(P: Polynomial, *, period_budget: int = 64
                          ) -> Renormalization:
    """Detect the first-return nest map around a bounded critical point."""
    escaping, bounded = classify_criticals(P)
    if not escaping:
        raise NotDisconnected("every critical point is bounded")
    if not bounded:
        raise NoBoundedCritical("every critical point escapes")
    d = P.degree
    b0 = choose_base_level(P, escaping)
    c0 = bounded[0].point
    loop0 = _enclosing_loop(P, c0, b0)
    # period: first return of the orbit of c0 to its own level piece
    r = None
    w = c0
    for k in range(1, period_budget + 1):
        w = P(w)
        if loop0.contains(w):
            r = k
            break
    if r is None:
        raise PeriodBudgetExceeded(
            f"critical orbit did not return within {period_budget} steps")
    # cycle pieces at the base level, for counting interior criticals
    cycle_loops = [loop0]
    w = c0
    for _ in range(r - 1):
        w = P(w)
        cycle_loops.append(_enclosing_loop(P, w, b0))
    interior = []
    for cb in bounded:
        if any(lp.contains(cb.point) for lp in cycle_loops):
            interior.append(cb)
    if not interior:
        raise NoCriticalInCycle("no bounded critical point in the cycle pieces")
    m = 1 + sum(cb.multiplicity for cb in interior)
    if m < 2:
        raise ModelMismatch("return map has degree 1")
    D = d ** r
    # properness probe: every target point must have m preimages in W*1
    loop1 = _enclosing_loop(P, c0, b0 / D)
    probe_loop = _enclosing_loop(P, c0, 0.85 * b0, n_points=512)
    fr = _iterated_poly(P, r)
    for idx in range(0, 512, 26):
        wpt = probe_loop.points[idx]
        roots = (fr - wpt).roots
        count = sum(1 for rt in roots if loop1.contains(complex(rt)))
        if count != m:
            raise ModelMismatch(
                f"return map covers a probe point {count} times, expected {m}")
    kf_address = component_address(P, c0, b0, depth=2)
    pairs = tuple(crash_angle_pair(P, c) for c in escaping)
    return Renormalization(r=r, m=m, D=D, b0=b0, kf_address=kf_address,
                           escaping=tuple(escaping),
                           interior_criticals=tuple(interior),
                           crash_pairs=pairs)


def main_crash_pair(ren: Renormalization) -> CrashPair:
    """The crash pair bounding the base piece: lowest stopping potential."""
    i = min(range(len(ren.escaping)),
            key=lambda j: ren.escaping[j].potential)
    return ren.crash_pairs[i]


def nest_probe(P: Polynomial, ren: Renormalization,
               poly_w: "_Loop | None" = None) -> Callable[[Angle], bool]:
    """Probe telling the two sides of a crash pair apart.

    An angle passes when its ray, taken down to a potential strictly
    between b0/D and b0, sits inside the base nest piece; gap angles
    descend into the co-piece pinched off at the stopping point instead.
    """
    if poly_w is None:
        poly_w = _enclosing_loop(P, ren.interior_criticals[0].point, ren.b0,
                                 n_points=2048)
    b_test = ren.b0 / math.sqrt(ren.D)

    def probe(angle: Angle) -> bool:
        tr = trace_ray(P, angle, b_start=2.0, b_end=b_test)
        return poly_w.contains(tr.samples[-1][1])

    return probe


# ---------------------------------------------------------------------------
# numeric membership: nest crossings, digit sectors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RenormGeometry:
    """Cached polygons for the numeric verdicts.

    poly_w / poly_w1: boundaries of the nest pieces at b0 and b0/D.
    gamma: the digit-reading loop at b0*D^(-3/2) inside W*1, carrying
    the 2m sector marks as arclength intervals.
    """
    P: Polynomial
    r: int
    D: int
    b0: float
    poly_w: _Loop
    poly_w1: _Loop
    gamma: _Loop
    sectors: tuple[tuple[float, float], ...]
    mark_angles: tuple[tuple[Fraction, Fraction], ...]

    @property
    def gamma_level(self) -> float:
        return self.b0 * self.D ** -1.5

    def fwd(self, z: complex, steps: int) -> complex:
        for _ in range(steps * self.r):
            z = self.P(z)
        return z


def _safe_mark(fa: FundamentalArcs, base: Fraction, inward: int) -> Fraction:
    """Mark angle near base, nudged inward, whose orbit avoids the gap ends.

    Candidate insets keep an odd numerator over a large power of two so
    the forward angle orbit can only finitely often share a denominator
    with the gap endpoints; the first candidate with a clean orbit wins.
    """
    g1, g2 = wrap(fa.gap[0]), wrap(fa.gap[1])
    for extra in range(12):
        mu = wrap(base + inward * Fraction(2 * extra + 1, 2 ** (11 + extra)))
        t = mu
        clean = True
        for _ in range(80):
            if t == g1 or t == g2:
                clean = False
                break
            t = wrap(fa.D * t)
        if clean:
            return mu
    raise PrecisionError("could not place a mark angle off the crash orbits")


def build_geometry(P: Polynomial, ren: Renormalization, fa: FundamentalArcs,
                   *, n_gamma: int = 8192) -> RenormGeometry:
    c0 = ren.interior_criticals[0].point
    b0, D = ren.b0, ren.D
    poly_w = _enclosing_loop(P, c0, b0, n_points=4096)
    poly_w1 = _enclosing_loop(P, c0, b0 / D, n_points=4096)
    b_gamma = b0 * D ** -1.5
    gamma = _enclosing_loop(P, c0, b_gamma, n_points=n_gamma)
    lvl2 = level_arcs(fa, 2)
    m = fa.m
    marks = []
    positions = []
    for j in range(m):
        chunk = lvl2[j * m:(j + 1) * m]
        if chunk[-1][1] - chunk[0][0] <= Fraction(1, 256):
            raise PrecisionError("digit sectors too narrow for the mark inset")
        lo = _safe_mark(fa, chunk[0][0], +1)
        hi = _safe_mark(fa, chunk[-1][1], -1)
        marks.append((lo, hi))
        pts = []
        for mu in (lo, hi):
            tr = trace_ray(P, Angle(mu), b_start=2.0, b_end=b_gamma)
            pts.append(tr.samples[-1][1])
        positions.append((gamma.position(pts[0]), gamma.position(pts[1])))
    total = gamma.length
    # the 2m marks must sit in circular order around the loop
    flat = [p for pair in positions for p in pair]
    rolled = [(p - flat[0]) % total for p in flat]
    if rolled != sorted(rolled):
        raise PrecisionError("digit sector marks are out of cyclic order")
    return RenormGeometry(P=P, r=ren.r, D=D, b0=b0, poly_w=poly_w,
                          poly_w1=poly_w1, gamma=gamma,
                          sectors=tuple(positions), mark_angles=tuple(marks))


def _sector_digit(geo: RenormGeometry, z: complex) -> int | None:
    pos = geo.gamma.position(z)
    total = geo.gamma.length
    for j, (a, b) in enumerate(geo.sectors):
        if (pos - a) % total <= (b - a) % total:
            return j
    return None


# rung position noise is amplified by the nest expansion when the sample
# is pushed forward, reaching ~3e-4 relative potential and ~2e-5 of a turn
# at depth 24; true strand aliases differ by whole powers of the degree in
# potential and ~0.1 turns in angle, so the slack costs nothing
_CERT_ANGLE_TOL = 3e-4
_CERT_POT_RTOL = 3e-3
# angles this close to a gap-endpoint preimage ride a pinched level-set
# neck where the plain ladder can slide onto the sibling strand without
# any forward measurement noticing (observed capture up to ~3e-4); such
# rays are retraced as the exact pinned angle with a side tag instead
_HAZARD = Fraction(1, 1000)


def _certified_rungs(P: Polynomial, tau: Angle, mids: Sequence[float],
                     samples: Sequence[tuple[float, complex]]
                     ) -> dict[int, complex]:
    """Keep only ray samples whose forward orbit confirms the angle.

    Newton continuation can hop onto a neighbouring strand of a level set
    where the ray squeezes past critical points of the potential.  The hop
    is invisible locally but the angle of a forward image at a comfortable
    potential is stable to measure, and a hopped strand carries a visibly
    different angle.  Samples that fail the check are dropped; the caller
    treats missing rungs as undecided, never as a verdict.
    """
    d = P.degree
    t = Fraction(tau.turns)
    by_level: dict[int, tuple[float, complex]] = {}
    for b, z in samples:
        for k, mk in enumerate(mids):
            if abs(b - mk) <= 1e-9 * mk:
                by_level[k] = (b, z)
    out: dict[int, complex] = {}
    for k, (b, z) in by_level.items():
        steps = max(0, math.ceil(-math.log(b) / math.log(d)))
        w = z
        for _ in range(steps):
            w = P(w)
        target_b = b * d ** steps
        try:
            gp = green_potential(P, w).value
            meas = external_angle(P, w)
        except (DomainError, PrecisionError):
            continue
        if abs(gp - target_b) > _CERT_POT_RTOL * target_b:
            continue
        want = float(wrap(t * d ** steps))
        diff = wrap(meas - want)
        if min(diff, 1 - diff) > _CERT_ANGLE_TOL:
            continue
        out[k] = z
    return out


def _nest_walk(geometry: RenormGeometry, rungs: dict[int, complex],
               k_max: int) -> tuple[str | None, int | None]:
    """Containment walk over certified rungs: (status, detail).

    Status None means undecided, with detail the first missing rung.  A
    ray sits inside the depth-k piece exactly when its mid-level sample
    lies in the base piece and the first k-1 return images stay in the
    deep one.
    """
    for k in range(k_max + 1):
        if k not in rungs:
            return None, k
        w = rungs[k]
        if not geometry.poly_w.contains(w):
            return EXCLUDED, k
        v = w
        for j in range(k):
            if not geometry.poly_w1.contains(v):
                return EXCLUDED, k
            if j < k - 1:
                v = geometry.fwd(v, 1)
    return MEMBER, None


def _nest_digits(geometry: RenormGeometry, rungs: dict[int, complex],
                 k_max: int) -> list[int] | None:
    digits: list[int] = []
    for k in range(1, k_max + 1):
        v = geometry.fwd(rungs[k], k - 1)
        dig = _sector_digit(geometry, v)
        if dig is None:
            return None
        digits.append(dig)
    return digits


def membership_numeric(P: Polynomial, ren: Renormalization,
                       fa: FundamentalArcs, tau: Angle, depth: int = 24,
                       geometry: RenormGeometry | None = None) -> LambdaVerdict:
    """Geometric verdict for an angle by tracing its ray through the nest.

    The ray is sampled between the levels b0/D^k; the verdict is member
    when every certified sample stays in the nest down to the requested
    depth, and excluded at the first step whose sample leaves it.  A
    crashed or strand-hopped trace only blanks the affected rungs: the
    verdict still stands whenever the surviving rungs decide it, which
    covers rays that leave the nest above the trouble spot.  Digits are
    read from the member samples against the sector marks and split into
    (preperiod, period) along the exact angle orbit when the traced depth
    covers one full cycle.  An orbit that hits a gap endpoint exactly is
    retraced one-sidedly (a tag picks the strand, a plain angle gets the
    strand outside the gap, whose verdict the plain angle shares); an
    orbit that merely passes within 1e-9 of an endpoint without hitting
    it is boundary_uncertain, since the float geometry cannot separate
    the strands there.  A plain angle is never consulted for its exact
    itinerary, only for these guards, so the verdict stays an independent
    check on the itinerary machinery.
    """
    if geometry is None:
        geometry = build_geometry(P, ren, fa)
    g1, g2 = wrap(fa.gap[0]), wrap(fa.gap[1])
    t0 = wrap(tau.turns)
    t = t0
    orbit: list[Fraction] = []
    seen: dict[Fraction, int] = {}
    # the guard and the digit split only ever look depth+1 steps ahead, so
    # the exact walk is capped there; huge-denominator orbits stay cheap
    cycle_start = cycle_len = None
    while len(orbit) <= depth + 1:
        if t in seen:
            cycle_start = seen[t]
            cycle_len = len(orbit) - cycle_start
            break
        seen[t] = len(orbit)
        orbit.append(t)
        for g in (g1, g2):
            diff = wrap(t - g)
            if 0 < min(diff, 1 - diff) < _PIN_TOL and tau.side == SIDE_NONE:
                return LambdaVerdict(tau, BOUNDARY_UNCERTAIN)
        t = wrap(fa.D * t)
    b0, D = ren.b0, ren.D
    # an orbit point within _HAZARD of a gap endpoint means the ray passes
    # a neck too tight for the plain ladder; retrace as the pinned angle
    # it shadows, tagged with the side the offset dictates, and expect the
    # walk to leave the nest within a step of the pinch
    trace_tau = tau
    pin_step = None
    for j, tj in enumerate(orbit):
        if j > depth:
            break
        for g in (g1, g2):
            off = wrap(tj - g)
            if off > Fraction(1, 2):
                off -= 1
            if abs(off) < _HAZARD:
                if off == 0 and tau.side != SIDE_NONE:
                    side = tau.side
                elif off == 0:
                    # exactly pinned, no tag: closed containment survives
                    # as long as the longer-lived strand, the one outside
                    # the gap, so that side carries the plain verdict
                    side = SIDE_LEFT if g == g1 else SIDE_RIGHT
                else:
                    side = SIDE_RIGHT if off > 0 else SIDE_LEFT
                trace_tau = Angle(wrap(t0 - off / D ** j), side)
                pin_step = j
                break
        if pin_step is not None:
            break
    mids = [b0 * D ** (-(k + 0.5)) for k in range(depth + 1)]
    rungs: dict[int, complex] = {}
    # deepen gradually: most non-members leave the nest within a few
    # levels, and a trace pushed far below the exclusion level wanders
    # into co-piece channels where the ladder dies; a pinned retrace is
    # further capped one level past the pinch, where it must have left
    k_limit = depth if pin_step is None else min(depth, pin_step + 1)
    k_target = min(3, k_limit)
    substeps = 4
    while True:
        try:
            tr = trace_ray(P, trace_tau, b_start=2.0,
                           b_end=mids[k_target] * 0.9, substeps=substeps,
                           extra_levels=[(-1, b) for b in mids[:k_target + 1]])
            rungs.update(_certified_rungs(P, trace_tau, mids, tr.samples))
        except PrecisionError:
            pass
        status, step = _nest_walk(geometry, rungs, k_target)
        if status == EXCLUDED:
            return LambdaVerdict(tau, EXCLUDED, excluded_at_step=step)
        if status == MEMBER:
            if k_target == depth:
                break
            if k_target == k_limit:
                raise PrecisionError(
                    "ray shadows a pinched angle yet stayed in the nest")
            k_target = min(k_limit, k_target + 4)
            substeps = 4
        elif substeps < 32:
            # certified rungs accumulate across attempts and the slide
            # spots of a pinched channel move with the rung grid, so a
            # denser ladder fills the holes the coarser passes left
            substeps *= 2
        elif pin_step is None and tau.side == SIDE_NONE:
            raise DomainError(
                f"ray could not be followed cleanly past level {step}; "
                "re-trace with a left/right tag")
        else:
            raise PrecisionError("tagged ray trace did not stabilize")
    digits = _nest_digits(geometry, rungs, depth)
    if digits is None:
        return LambdaVerdict(tau, BOUNDARY_UNCERTAIN)
    if cycle_start is None or len(digits) < cycle_start + cycle_len:
        return LambdaVerdict(tau, MEMBER)
    pre = tuple(digits[:cycle_start])
    per = tuple(digits[cycle_start:cycle_start + cycle_len])
    for i in range(cycle_start, len(digits)):
        if digits[i] != per[(i - cycle_start) % cycle_len]:
            return LambdaVerdict(tau, BOUNDARY_UNCERTAIN)
    return LambdaVerdict(tau, MEMBER, digits_preperiod=pre, digits_period=per)


def verify_p2(P: Polynomial, ren: Renormalization, fa: FundamentalArcs,
              geometry: RenormGeometry | None = None,
              taus: Sequence[Angle] | None = None) -> float:
    """Check each ray enters the deep nest piece at most once; return b*.

    b* is the lowest potential at which a checked ray crosses into W*1;
    any ray crossing the boundary more than once, or anywhere far from
    the level b0/D where that boundary lives, is a hard failure.
    """
    if geometry is None:
        geometry = build_geometry(P, ren, fa)
    if taus is None:
        taus = [Angle(wrap(fa.fixed_angle(j))) for j in range(fa.m)]
    b0, D = ren.b0, ren.D
    b_star = math.inf
    for tau in taus:
        tr = trace_ray(P, tau, b_start=2.0, b_end=b0 * D ** -2.5)
        flags = [(b, geometry.poly_w1.contains(z)) for b, z in tr.samples]
        entries = 0
        exits = 0
        for (b_hi, f_hi), (b_lo, f_lo) in zip(flags, flags[1:]):
            if not f_hi and f_lo:
                entries += 1
                cross = math.sqrt(b_hi * b_lo)
                # bracket coarseness plus polygon sag keep an honest
                # crossing within a few percent of b0/D; a factor drifting
                # toward D means the claimed base level and the geometry
                # disagree
                if not 0.7 < cross / (b0 / D) < 1.4:
                    raise TheoremViolation(
                        f"ray {tau} enters the deep nest piece at potential "
                        f"{cross:.6g}, far from the level {b0 / D:.6g}")
                b_star = min(b_star, cross)
            elif f_hi and not f_lo:
                exits += 1
        if entries > 1 or exits > 0:
            raise TheoremViolation(
                f"ray {tau} crosses the deep nest boundary {entries + exits} times")
    return b_star


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def renorm_to_json_dict(ren: Renormalization) -> dict:
    return {
        "r": ren.r,
        "m": ren.m,
        "D": ren.D,
        "b0": f"{ren.b0:.17g}",
        "kf_address": list(ren.kf_address),
        "crash_pairs": [{"theta1": str(p.theta1), "theta2": str(p.theta2)}
                        for p in ren.crash_pairs],
    }
