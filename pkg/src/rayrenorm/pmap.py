"""Exact combinatorics of the ray-argument set and its itinerary coding.

Everything here runs in rational arithmetic on the circle T = R/Z.  The
model is a gap G (open arc of excluded angles), its closed complement B,
and the m fundamental arcs: the connected components of B ∩ σ_D^{-1}(B).
Angles whose full σ_D-orbit stays inside the arcs form the invariant set
Λ; reading off which arc each orbit point visits gives the base-m digit
stream of the itinerary map p.

Arc bookkeeping uses "lift coordinates": the complement B lifted to the
interval [θ2, θ1 + 1] on the real line, where G = (θ1, θ2).  σ_D acts on
an arc as x ↦ D·x − c with an integer c, which keeps every step exact.

Side conventions: a "left" tag means the limit from below (clockwise
side), "right" the limit from above.  One-sided digit streams follow Λ:
where the orbit falls off the arcs, the stream continues with the digits
of the nearest Λ-point on the tagged side.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .angles import SIDE_LEFT, SIDE_NONE, SIDE_RIGHT, Angle, wrap
from .errors import DomainError, ModelMismatch, TheoremViolation

MEMBER = "member"
EXCLUDED = "excluded"
BOUNDARY_UNCERTAIN = "boundary_uncertain"

SINGLETON = "singleton"
CASE_I = "case_i"
CASE_II = "case_ii"


# ---------------------------------------------------------------------------
# the arcs model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FundamentalArcs:
    """m closed arcs coding the invariant angle set of a degree-D angle map.

    gap: (θ1, θ2), the open counterclockwise arc from θ1 to θ2 of excluded
    angles.  arcs: closed intervals in lift coordinates on [θ2, θ2 + 1),
    ascending; arcs[j] carries digit j.  base_fixed_angle: the σ_D-fixed
    angle inside arcs[0]; its all-zero digit stream anchors p = 0.
    """

    D: int
    m: int
    gap: tuple[Fraction, Fraction]
    arcs: tuple[tuple[Fraction, Fraction], ...]
    base_fixed_angle: Angle

    def __post_init__(self) -> None:
        if self.D < 2:
            raise ValueError("D must be at least 2")
        if self.m != len(self.arcs):
            raise ValueError("m must equal the number of arcs")
        if self.m < 2:
            raise ModelMismatch("fewer than two fundamental arcs")
        lo, hi = self.lift_base, self.lift_top
        if not lo < hi <= lo + 1:
            raise ValueError("gap does not define a proper complement")
        blen = self.complement_length
        prev_end = None
        for a, b in self.arcs:
            if b - a != Fraction(blen, self.D):
                raise ModelMismatch("arc length differs from |B|/D")
            if not (lo <= a and b <= hi):
                raise ModelMismatch("arc leaves the complement of the gap")
            if prev_end is not None and a <= prev_end:
                raise ModelMismatch("arcs out of order or overlapping")
            prev_end = b
            if (self.D * a - lo).denominator != 1:
                raise ModelMismatch("arc does not map affinely onto the complement")
        tau = self.base_fixed_angle.turns
        if wrap(self.D * tau) != tau:
            raise ModelMismatch("base angle is not fixed under the angle map")
        if self.arc_index(tau) != 0:
            raise ModelMismatch("base angle does not lie in the digit-0 arc")

    # --- derived geometry, all exact ---

    @property
    def lift_base(self) -> Fraction:
        return self.gap[1]

    @property
    def lift_top(self) -> Fraction:
        return self.gap[1] + wrap(self.gap[0] - self.gap[1])

    @property
    def complement_length(self) -> Fraction:
        return self.lift_top - self.lift_base

    def lift(self, t: Fraction) -> Fraction:
        """Representative of t mod 1 in [lift_base, lift_base + 1)."""
        return self.lift_base + wrap(t - self.lift_base)

    def shift(self, j: int) -> int:
        """Integer c with σ_D x = D·x − c mapping arcs[j] onto the lifted B."""
        return int(self.D * self.arcs[j][0] - self.lift_base)

    def sigma_lift(self, x: Fraction, j: int) -> Fraction:
        return self.D * x - self.shift(j)

    def inverse_branch(self, y: Fraction, j: int) -> Fraction:
        """The affine branch of σ_D^{-1} landing in arcs[j]; y in lifted B."""
        return Fraction(y + self.shift(j), self.D)

    def arc_index(self, t: Fraction) -> int | None:
        x = self.lift(t)
        for j, (a, b) in enumerate(self.arcs):
            if a <= x <= b:
                return j
        return None

    def in_gap(self, t: Fraction) -> bool:
        g1, g2 = self.gap
        return 0 < wrap(t - g1) < wrap(g2 - g1)

    def on_gap_boundary(self, t: Fraction) -> bool:
        return wrap(t) in (wrap(self.gap[0]), wrap(self.gap[1]))

    def fixed_angle(self, j: int) -> Fraction:
        """The unique σ_D-fixed angle in arcs[j], as a lift coordinate.

        The lifted map x ↦ D·x − c_j sends the arc onto all of B, which
        contains the arc, so the affine fixed point already lies inside.
        """
        return Fraction(self.shift(j), self.D - 1)


def arcs_from_gap(D: int, gap: tuple[Fraction, Fraction],
                  theta_v: Fraction | None = None) -> FundamentalArcs:
    """Build the fundamental arcs of the gap model in exact arithmetic.

    gap = (θ1, θ2) is the open counterclockwise arc of excluded angles; if
    the critical-value angle θ_v is supplied it must lie strictly inside.
    Each σ_D-preimage branch of B must fall entirely inside B (an arc) or
    entirely inside the closed gap (discarded); a branch straddling the
    boundary means the gap model does not describe this geometry.
    """
    g1 = wrap(Fraction(gap[0]))
    g2 = wrap(Fraction(gap[1]))
    if g1 == g2:
        raise ModelMismatch("empty gap")
    if theta_v is not None:
        if not 0 < wrap(Fraction(theta_v) - g1) < wrap(g2 - g1):
            raise ModelMismatch(
                "critical value angle does not lie strictly inside the gap")
    lo = g2
    hi = g2 + wrap(g1 - g2)  # lifted B = [lo, hi], gap lift = (hi, lo + 1)
    blen = hi - lo
    branch_len = Fraction(blen, D)
    arcs: list[tuple[Fraction, Fraction]] = []
    for j in range(D):
        s = Fraction(lo + j, D)
        s = lo + wrap(s - lo)  # place branch start inside [lo, lo + 1)
        e = s + branch_len
        if e <= hi:
            arcs.append((s, e))
        elif s >= hi and e <= lo + 1:
            continue  # branch sits inside the closed gap
        else:
            raise ModelMismatch("preimage branch straddles the gap boundary")
    if len(arcs) < 2:
        raise ModelMismatch(f"only {len(arcs)} fundamental arc(s); need at least 2")
    if len(arcs) == D:
        raise ModelMismatch("no branch excluded; degenerate gap")
    arcs.sort()
    base = wrap(Fraction(int(D * arcs[0][0] - lo), D - 1))
    return FundamentalArcs(D=D, m=len(arcs), gap=(g1, g2), arcs=tuple(arcs),
                           base_fixed_angle=Angle(base))


def build_arcs(ren, pair, orientation_probe: Callable[[Angle], bool]) -> FundamentalArcs:
    """Arcs model from a detected renormalization and one crash pair.

    orientation_probe(angle) must report whether the ray of that angle
    reaches the small filled Julia set; the gap is the side of the crash
    pair whose midpoint fails the probe.
    """
    if ren.r != 1:
        raise DomainError("exact arcs model implemented for period 1 only")
    t1 = wrap(pair.theta1.turns)
    t2 = wrap(pair.theta2.turns)
    mid_12 = wrap(t1 + wrap(t2 - t1) / 2)   # midpoint of ccw arc (t1, t2)
    mid_21 = wrap(t2 + wrap(t1 - t2) / 2)
    in_12 = bool(orientation_probe(Angle(mid_12)))
    in_21 = bool(orientation_probe(Angle(mid_21)))
    if in_12 == in_21:
        raise ModelMismatch("orientation probe cannot separate the two sides")
    gap = (t2, t1) if in_12 else (t1, t2)
    theta_v = wrap(Fraction(ren.D) * t1)  # common image of the crash pair
    fa = arcs_from_gap(ren.D, gap, theta_v=theta_v)
    if fa.m != ren.m:
        raise ModelMismatch(
            f"gap model yields {fa.m} arcs but the return map has degree {ren.m}")
    return fa


# ---------------------------------------------------------------------------
# membership and digit streams
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LambdaVerdict:
    angle: Angle
    status: str
    excluded_at_step: int | None = None
    digits_preperiod: tuple[int, ...] | None = None
    digits_period: tuple[int, ...] | None = None

    @property
    def is_member(self) -> bool:
        return self.status == MEMBER


def _plain_digits(fa: FundamentalArcs, t: Fraction
                  ) -> tuple[tuple[int, ...], tuple[int, ...]] | int:
    """Digit stream of a member, or the exclusion step as an int."""
    x = fa.lift(t)
    seen: dict[Fraction, int] = {}
    digits: list[int] = []
    while True:
        if x in seen:
            k = seen[x]
            return tuple(digits[:k]), tuple(digits[k:])
        j = fa.arc_index(x)
        if j is None:
            # either in the open gap now, or in B outside the arcs, in which
            # case the next image lands in the open gap
            return len(digits) if fa.in_gap(x) else len(digits) + 1
        seen[x] = len(digits)
        digits.append(j)
        x = fa.sigma_lift(x, j)


def _sided_digits(fa: FundamentalArcs, t: Fraction, side: str
                  ) -> tuple[tuple[int, ...], tuple[int, ...]] | int:
    """One-sided counterpart of _plain_digits.

    Containment tests become half-open and the tag rides the whole orbit
    unchanged (the angle map preserves orientation), so the result is the
    verdict shared by all angles slightly to that side.  A fall into a
    dead strip between arcs is counted from the following index, when the
    image reaches the open gap.
    """
    right = side == SIDE_RIGHT
    x = fa.lift(t)
    seen: dict[Fraction, int] = {}
    digits: list[int] = []
    while True:
        if x in seen:
            k = seen[x]
            return tuple(digits[:k]), tuple(digits[k:])
        if not right and x == fa.lift_base:
            # left of the gap top is the open gap, at the far end of the lift
            return len(digits)
        j = None
        for jj, (a, b) in enumerate(fa.arcs):
            if (a <= x < b) if right else (a < x <= b):
                j = jj
                break
        if j is None:
            break
        seen[x] = len(digits)
        digits.append(j)
        x = fa.sigma_lift(x, j)
    g1, g2 = fa.gap
    glen = wrap(g2 - g1)
    step = len(digits)
    for extra in range(3):
        d = wrap(wrap(x) - g1)
        if (0 <= d < glen) if right else (0 < d <= glen):
            return step + extra
        x = wrap(fa.D * wrap(x))
    raise ModelMismatch("strip between the arcs does not fall into the gap")


def one_sided_digits(fa: FundamentalArcs, t: Fraction, side: str
                     ) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Digit stream of the one-sided limit along Λ at angle t.

    From the right (limit from above) a point outside every arc snaps to
    the start of the next arc counterclockwise; from the left it snaps to
    the end of the nearest arc clockwise.  Snapping reproduces the digits
    of the nearest Λ-points on that side, so the stream always exists.
    """
    if side not in (SIDE_LEFT, SIDE_RIGHT):
        raise DomainError("one-sided digits need a left or right tag")
    x = fa.lift(t)
    seen: dict[tuple[Fraction, str], int] = {}
    digits: list[int] = []
    while True:
        key = (x, side)
        if key in seen:
            k = seen[key]
            return tuple(digits[:k]), tuple(digits[k:])
        seen[key] = len(digits)
        j = None
        for jj, (a, b) in enumerate(fa.arcs):
            inside = (a <= x < b) if side == SIDE_RIGHT else (a < x <= b)
            if inside:
                j = jj
                break
        if j is not None:
            digits.append(j)
            x = fa.sigma_lift(x, j)
            continue
        if side == SIDE_RIGHT:
            nxt = [jj for jj, (a, _) in enumerate(fa.arcs) if a > x]
            if nxt:
                digits.append(nxt[0])
                x = fa.lift_base  # σ_D of every arc start
            else:
                # above every arc: the extension is continuous, so the
                # limit is the top of the current turn, written with the
                # all-(m-1) tail rather than the next turn's bottom stream
                digits.append(fa.m - 1)
                x = fa.lift_top
        else:
            prev = [jj for jj, (_, b) in enumerate(fa.arcs) if b < x]
            if prev:
                digits.append(prev[-1])
                x = fa.lift_top  # σ_D of every arc end, as a lift point
            else:
                # below every arc: the bottom of the turn, the all-0 tail
                digits.append(0)
                x = fa.lift_base


def membership(fa: FundamentalArcs, tau: Angle) -> LambdaVerdict:
    """Exact verdict for a rational angle; total, never uncertain.

    A side tag asks for the verdict of the one-sided limit: plain closed
    containment is replaced by half-open tests, so the answer is the one
    shared by all nearby angles on that side.  Where an orbit touches a
    gap endpoint the two sides genuinely differ (the ray pinches there);
    everywhere else all three verdicts coincide.
    """
    t = tau.turns
    if tau.side == SIDE_NONE:
        res = _plain_digits(fa, t)
    else:
        res = _sided_digits(fa, t, tau.side)
    if isinstance(res, int):
        return LambdaVerdict(tau, EXCLUDED, excluded_at_step=res)
    pre, per = res
    return LambdaVerdict(tau, MEMBER, digits_preperiod=pre, digits_period=per)


def digits_value(pre: Sequence[int], per: Sequence[int], m: int) -> Fraction:
    """Exact value of the base-m stream pre + per·per·… in [0, 1)."""
    v = Fraction(0)
    for d in pre:
        v = v * m + d
    head = v / Fraction(m) ** len(pre)
    if not per:
        return wrap(head)
    c = Fraction(0)
    for d in per:
        c = c * m + d
    tail = Fraction(c, m ** len(per) - 1) / Fraction(m) ** len(pre)
    return wrap(head + tail)


def compute_p(fa: FundamentalArcs, tau: Angle) -> Angle:
    """The itinerary value p(τ) of a member angle, exactly."""
    verdict = membership(fa, tau)
    if not verdict.is_member:
        raise DomainError(f"{tau} is not in the invariant angle set")
    return Angle(digits_value(verdict.digits_preperiod, verdict.digits_period, fa.m))


def extend_p(fa: FundamentalArcs, tau: Angle) -> Angle:
    """Monotone degree-one extension of p to the whole circle.

    Walks the exact orbit emitting digits while it stays on the arcs; the
    first time it falls into a hole the value is completed with the count
    of arcs lying entirely below the point (the constant value p takes on
    that hole).  Side tags select the corresponding one-sided stream.
    """
    if tau.side != SIDE_NONE:
        pre, per = one_sided_digits(fa, tau.turns, tau.side)
        return Angle(digits_value(pre, per, fa.m))
    x = fa.lift(tau.turns)
    seen: dict[Fraction, int] = {}
    digits: list[int] = []
    while True:
        if x in seen:
            k = seen[x]
            return Angle(digits_value(digits[:k], digits[k:], fa.m))
        j = fa.arc_index(x)
        if j is None:
            below = sum(1 for (_, b) in fa.arcs if b < x)
            v = digits_value(digits + [below], (), fa.m)
            return Angle(v)
        seen[x] = len(digits)
        digits.append(j)
        x = fa.sigma_lift(x, j)


def _expansions(t: Fraction, m: int
                ) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Base-m digit expansions of t on the circle, canonical first.

    Rationals whose denominator divides a power of m have two expansions
    (terminating, and its dual ending in all (m−1)s); everything else has
    one eventually periodic expansion.
    """
    t = wrap(t)
    seen: dict[Fraction, int] = {}
    digs: list[int] = []
    x = t
    while x not in seen:
        seen[x] = len(digs)
        xm = x * m
        d = int(xm)
        digs.append(d)
        x = xm - d
    k = seen[x]
    pre, per = tuple(digs[:k]), tuple(digs[k:])
    out = [(pre, per)]
    if per == (0,):
        # terminating expansion; build the dual ending in (m−1)s
        head = list(pre)
        while head and head[-1] == 0:
            head.pop()
        if head:
            head[-1] -= 1
            out.append((tuple(head), (m - 1,)))
        else:
            # t = 0 on the circle: dual expansion is all (m−1)s
            out.append(((), (m - 1,)))
    return out


def p_preimage(fa: FundamentalArcs, t: Angle) -> tuple[Angle, ...]:
    """All member angles with p = t: one angle, or the two bounding a hole.

    Composes the affine inverse branches over one preperiod+period block
    of each base-m expansion of t and solves the fixed-point equation
    exactly.  The canonical (terminating) expansion comes first.
    """
    results = []
    for pre, per in _expansions(t.turns, fa.m):
        # fixed point s of φ_{per[0]} ∘ … ∘ φ_{per[-1]}
        alpha, beta = Fraction(1), Fraction(0)
        for d in reversed(per):
            # wrap φ_d around the current affine map x ↦ αx + β
            alpha = Fraction(alpha, fa.D)
            beta = Fraction(beta + fa.shift(d), fa.D)
        s = beta / (1 - alpha)
        for d in reversed(pre):
            s = fa.inverse_branch(s, d)
        results.append(Angle(wrap(s)))
    # the two expansions of a dyadic-like value give distinct angles
    uniq: list[Angle] = []
    for a in results:
        if all(a.turns != b.turns for b in uniq):
            uniq.append(a)
    return tuple(uniq)


# ---------------------------------------------------------------------------
# level covers, holes, measure
# ---------------------------------------------------------------------------

@lru_cache(maxsize=256)
def level_arcs(fa: FundamentalArcs, n: int) -> tuple[tuple[Fraction, Fraction], ...]:
    """The m^n closed intervals (lift coordinates) surviving n digit steps."""
    if n < 0:
        raise DomainError("level must be nonnegative")
    intervals = [(fa.lift_base, fa.lift_top)]
    for _ in range(n):
        nxt = []
        for a, b in intervals:
            for j in range(fa.m):
                nxt.append((fa.inverse_branch(a, j), fa.inverse_branch(b, j)))
        nxt.sort()
        intervals = nxt
    return tuple(intervals)


def level_cover_measure(fa: FundamentalArcs, n: int) -> Fraction:
    """Exact total length of the level-n cover: |B|·(m/D)^n."""
    if n < 0:
        raise DomainError("level must be nonnegative")
    return fa.complement_length * Fraction(fa.m, fa.D) ** n


@lru_cache(maxsize=256)
def level_holes(fa: FundamentalArcs, n: int) -> tuple[tuple[Fraction, Fraction], ...]:
    """Complement components of the level-n cover, as ccw arcs mod 1.

    Each hole (lo, hi) is the open arc counterclockwise from lo to hi that
    meets no level-n interval; endpoints are reduced mod 1.
    """
    ivs = level_arcs(fa, n)
    holes = []
    for (a0, b0), (a1, _) in zip(ivs, ivs[1:]):
        holes.append((wrap(b0), wrap(a1)))
    # wrap-around hole: from the last interval's end to the first's start
    holes.append((wrap(ivs[-1][1]), wrap(ivs[0][0])))
    return tuple(holes)


# ---------------------------------------------------------------------------
# fibers and the rotation ambiguity
# ---------------------------------------------------------------------------

@dataclass
class PMapEntry:
    tau: Angle
    p_value: Angle
    fiber_id: int = -1
    fiber_case: str = ""


@dataclass(frozen=True)
class Fiber:
    p_value: Angle
    taus: tuple[Angle, ...]
    case: str
    evidence: dict = field(default_factory=dict, compare=False)


def _is_hole_dual_pair(fa: FundamentalArcs, a: Angle, b: Angle, depth: int) -> bool:
    """True when {a, b} are the side-tagged endpoints of one level-n hole.

    The matching tags point away from the hole, along Λ: the hole's lower
    endpoint tagged left (limit from below), the upper tagged right.
    """
    for n in range(depth + 1):
        for lo, hi in level_holes(fa, n):
            if (a.turns, a.side) == (lo, SIDE_LEFT) and (b.turns, b.side) == (hi, SIDE_RIGHT):
                return True
            if (b.turns, b.side) == (lo, SIDE_LEFT) and (a.turns, a.side) == (hi, SIDE_RIGHT):
                return True
    return False


def fiber_classify(entries: Sequence[PMapEntry], P, ren, fa: FundamentalArcs,
                   *, hole_depth: int = 8, trace=None,
                   landing_tol: float = 1e-4, periodic_tol: float = 1e-5,
                   period_budget: int = 16, separation_floor: float = 1e-6
                   ) -> list[Fiber]:
    """Group entries by exact p-value and classify every multi-point fiber.

    A two-element fiber of side-tagged duals across a hole of the level
    cover is case_i (the rays crash into a common precritical point).  Any
    other multi-element fiber must be case_ii: its rays are traced, pairwise
    disjointness above the landing window is checked, the landings must
    coincide within landing_tol, and the common landing point must return
    to itself under P^{r·n} for some n ≤ period_budget within periodic_tol.
    `trace` is a callable (angle) -> RayTrace used for the case_ii checks;
    omitting it skips them only for fibers that need no numeric evidence.
    """
    groups: dict[Fraction, list[PMapEntry]] = {}
    for e in entries:
        groups.setdefault(wrap(e.p_value.turns), []).append(e)
    fibers: list[Fiber] = []
    for value in sorted(groups):
        members = groups[value]
        taus = tuple(e.tau for e in members)
        if len(members) == 1:
            case, evidence = SINGLETON, {}
        elif len(members) == 2 and _is_hole_dual_pair(fa, taus[0], taus[1], hole_depth):
            case, evidence = CASE_I, {"pattern": "hole_dual_pair"}
        else:
            if trace is None:
                raise DomainError(
                    "a multi-element fiber needs ray traces for case_ii checks")
            case, evidence = _verify_case_ii(
                members, P, ren, trace, landing_tol, periodic_tol,
                period_budget, separation_floor)
        fiber = Fiber(Angle(value), taus, case, evidence)
        fid = len(fibers)
        for e in members:
            e.fiber_id = fid
            e.fiber_case = case
        fibers.append(fiber)
    return fibers


def _verify_case_ii(members, P, ren, trace, landing_tol, periodic_tol,
                    period_budget, separation_floor) -> tuple[str, dict]:
    traces = [trace(e.tau) for e in members]
    landings = []
    for tr in traces:
        if tr.landing is None:
            raise TheoremViolation(
                f"fiber ray {tr.angle} produced no landing estimate")
        landings.append(tr.landing[0])
    spread = max(abs(z - w) for z in landings for w in landings)
    if spread > landing_tol:
        raise TheoremViolation(
            f"fiber rays land {spread:.3e} apart, beyond {landing_tol:.1e}")
    # pairwise disjointness above the landing region, on shared ladder rungs
    min_sep = float("inf")
    for i in range(len(traces)):
        si = {b: z for b, z in traces[i].samples}
        for k in range(i + 1, len(traces)):
            for b, z in traces[k].samples:
                zi = si.get(b)
                if zi is not None and b > separation_floor:
                    min_sep = min(min_sep, abs(z - zi))
    if min_sep <= 1e-9:
        raise TheoremViolation(
            f"fiber rays approach within {min_sep:.3e} above the landing region")
    z0 = sum(landings) / len(landings)
    w = z0
    period = None
    for n in range(1, period_budget + 1):
        for _ in range(ren.r):
            w = P(w)
        if abs(w - z0) <= periodic_tol:
            period = n
            break
    if period is None:
        raise TheoremViolation(
            "fiber landing point does not return to itself within the budget")
    return CASE_II, {
        "landing": z0,
        "landing_spread": spread,
        "min_separation": min_sep,
        "return_period": period,
    }


def rotation_check(fa: FundamentalArcs, alt_base: Angle,
                   sample: Iterable[Angle]) -> Angle:
    """Difference between the itinerary maps anchored at two fixed angles.

    Re-anchoring the digit origin at alt_base adds a constant k to every
    digit (unreduced), which shifts p by exactly k/(m−1); the shift is
    recomputed on every sample angle and must come out identical, and the
    re-anchored map must still intertwine the two circle maps.
    """
    j0 = None
    for j in range(fa.m):
        if wrap(fa.fixed_angle(j)) == wrap(alt_base.turns):
            j0 = j
            break
    if j0 is None:
        raise DomainError("alt_base must be one of the σ_D-fixed member angles")
    if fa.m == 2:
        k = 0
    else:
        k = (-j0) % (fa.m - 1)
    shift = wrap(Fraction(k, fa.m - 1))
    for tau in sample:
        verdict = membership(fa, tau)
        if not verdict.is_member:
            raise DomainError(f"sample angle {tau} is not a member")
        pre, per = verdict.digits_preperiod, verdict.digits_period
        p_here = digits_value(pre, per, fa.m)
        p_shifted = digits_value([d + k for d in pre], [d + k for d in per], fa.m)
        if wrap(p_shifted - p_here) != shift:
            raise TheoremViolation(
                f"re-anchored p differs by {p_shifted - p_here} at {tau}, not {shift}")
        # the shifted map must still be a semiconjugacy, checked independently
        image = Angle(wrap(Fraction(fa.D) * tau.turns))
        lhs = wrap(Fraction(fa.m) * wrap(p_here + shift))
        rhs = wrap(compute_p(fa, image).turns + shift)
        if lhs != rhs:
            raise TheoremViolation(
                f"re-anchored p is not a semiconjugacy at {tau}")
    return Angle(shift)
