"""Invariant suites over one polynomial, aggregated into a JSON report.

Every suite is independent and deterministic: randomness comes from a
seed carried in the RunConfig, exact checks use rational arithmetic, and
the report serializes with sorted keys so equal configs give equal bytes.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

from .angles import SIDE_LEFT, SIDE_RIGHT, Angle, circ_dist, sigma, wrap
from .errors import DomainError, PrecisionError, TheoremViolation
from .pmap import (
    BOUNDARY_UNCERTAIN,
    EXCLUDED,
    FundamentalArcs,
    PMapEntry,
    build_arcs,
    compute_p,
    digits_value,
    extend_p,
    fiber_classify,
    level_arcs,
    level_cover_measure,
    level_holes,
    membership,
    one_sided_digits,
    p_preimage,
    rotation_check,
)
from .poly import Polynomial, escape_radius, green_potential, poly_from_json_dict
from .rays import trace_ray
from .renorm import (
    RenormGeometry,
    Renormalization,
    build_geometry,
    build_renormalization,
    main_crash_pair,
    membership_numeric,
    nest_probe,
    verify_p2,
)

# orbit points this close to a gap endpoint justify an abstention
_BOUNDARY_BAND = Fraction(1, 10 ** 9)


@dataclass(frozen=True)
class RunConfig:
    """Everything a verify or render run depends on.

    poly is either a path to a polynomial JSON file or the JSON text
    itself (anything starting with "{").  All sampling is driven by
    seed; equal configs must produce byte-identical outputs.
    """
    poly: str
    seed: int = 0
    depth: int = 24
    den_max: int = 10 ** 6
    samples: int = 500          # cross-validation draws
    points: int = 200           # potential-equation draws
    rays: int = 50              # push-forward angles
    grid_k: int = 8             # exact grids use denominator D^k - 1, m^k - 1
    mono_grid: int = 10 ** 4    # equispaced angles for the monotonicity sweep
    b_start: float = 2.0
    b_end: float = 1e-6
    tol_green: float = 1e-8
    tol_push: float = 1e-6
    tol_level: float = 1e-9
    out: str = ""

    def echo(self) -> dict:
        # the output destination has no effect on any computed result, so
        # it stays out of the report: equal inputs, equal bytes
        d = asdict(self)
        d.pop("out")
        return d


def load_polynomial(source: str) -> Polynomial:
    """Polynomial from a JSON file path or inline JSON text."""
    if source.lstrip().startswith("{"):
        text = source
    else:
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise DomainError(f"cannot read polynomial source: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"polynomial source is not valid JSON: {exc}") from exc
    return poly_from_json_dict(data)


@dataclass
class _Context:
    """Shared state for one verify run; grids are computed once and reused."""
    P: Polynomial
    ren: Renormalization
    fa: FundamentalArcs
    geo: RenormGeometry
    cfg: RunConfig
    _grids: dict[int, tuple[int, dict[int, Fraction]]] = field(default_factory=dict)

    def member_grid(self, k: int) -> tuple[int, dict[int, Fraction]]:
        """(den, {numerator: exact p}) for members with denominator D^k - 1.

        A fast integer pass filters the grid first: the orbit of num/den
        under multiplication by D mod den closes within k steps, and a
        member's whole orbit must sit inside the closed arcs.  Survivors
        are confirmed by the exact walk, which also yields p; any
        disagreement between the two lanes is a bug and raised loudly.
        """
        if k in self._grids:
            return self._grids[k]
        fa = self.fa
        den = fa.D ** k - 1
        inside = bytearray(den)
        for a, b in fa.arcs:
            # lift coordinates may pass 1; split into wrapped segments
            segs = [(a, min(b, Fraction(1)))]
            if b > 1:
                segs.append((Fraction(0), b - 1))
            for lo, hi in segs:
                lo_n = math.ceil(lo * den)
                hi_n = min(math.floor(hi * den), den - 1)
                if lo_n <= hi_n:
                    inside[lo_n:hi_n + 1] = b"\x01" * (hi_n - lo_n + 1)
        members: dict[int, Fraction] = {}
        for num in range(den):
            x = num
            ok = True
            for _ in range(k):
                if not inside[x]:
                    ok = False
                    break
                x = x * fa.D % den
            if not ok:
                continue
            verdict = membership(fa, Angle(Fraction(num, den)))
            if not verdict.is_member:
                raise TheoremViolation(
                    f"grid prefilter admits {num}/{den} but the exact walk "
                    f"excludes it at step {verdict.excluded_at_step}")
            members[num] = digits_value(
                verdict.digits_preperiod, verdict.digits_period, fa.m)
        self._grids[k] = (den, members)
        return den, members


def build_context(config: RunConfig, P: Polynomial | None = None) -> _Context:
    if P is None:
        P = load_polynomial(config.poly)
    ren = build_renormalization(P)
    fa = build_arcs(ren, main_crash_pair(ren), nest_probe(P, ren))
    geo = build_geometry(P, ren, fa)
    return _Context(P=P, ren=ren, fa=fa, geo=geo, cfg=config)


# ---------------------------------------------------------------------------
# the suites; each returns (checked, violations, worst_residual)
# ---------------------------------------------------------------------------

_Result = tuple[int, list[str], float | str]


def _suite_poly_core(ctx: _Context, rng: random.Random) -> _Result:
    """u(P(z)) = d * u(z) on random escaping points."""
    P, cfg = ctx.P, ctx.cfg
    d = P.degree
    R = escape_radius(P)
    checked = 0
    worst = 0.0
    violations: list[str] = []
    attempts = 0
    while checked < cfg.points:
        attempts += 1
        if attempts > 40 * cfg.points:
            raise PrecisionError("could not find enough escaping sample points")
        z = complex(rng.uniform(-2 * R, 2 * R), rng.uniform(-2 * R, 2 * R))
        g = green_potential(P, z)
        if not g.escaped or g.value < 1e-6:
            continue
        lhs = green_potential(P, P(z)).value
        res = abs(lhs - d * g.value) / max(1.0, d * g.value)
        worst = max(worst, res)
        if res > cfg.tol_green:
            violations.append(f"point {z:.6g}: potential residual {res:.3g}")
        checked += 1
    return checked, violations, worst


def _suite_push_forward(ctx: _Context, rng: random.Random) -> _Result:
    """P maps the ray of tau onto the ray of sigma_d(tau), level d*b."""
    P, cfg = ctx.P, ctx.cfg
    d = P.degree
    # probe levels above the deepest crash keep both traces clean of branches
    top = max(c.potential for c in ctx.ren.escaping)
    probes = tuple(top * s for s in (1.15, 1.7, 2.6))
    checked = 0
    worst = 0.0
    violations: list[str] = []
    attempts = 0
    while checked < cfg.rays and attempts < 6 * cfg.rays:
        attempts += 1
        den = rng.randint(3, 9999)
        tau = Angle(Fraction(rng.randint(0, den - 1), den))
        image = Angle(sigma(d, tau.turns))
        try:
            tr = trace_ray(P, tau, b_start=max(cfg.b_start, probes[-1] * 1.4),
                           b_end=probes[0] * 0.9,
                           extra_levels=list(enumerate(probes)))
            tr_im = trace_ray(P, image,
                              b_start=max(cfg.b_start, d * probes[-1] * 1.4),
                              b_end=d * probes[0] * 0.9,
                              extra_levels=[(i, d * b) for i, b in enumerate(probes)])
        except (DomainError, PrecisionError):
            continue
        zs = {i: z for i, _, z in tr.nest_crossings}
        zs_im = {i: z for i, _, z in tr_im.nest_crossings}
        for i, b in enumerate(probes):
            if i not in zs or i not in zs_im:
                violations.append(f"angle {tau}: missing sample at level {b:.4g}")
                continue
            err = abs(P(zs[i]) - zs_im[i])
            worst = max(worst, err)
            if err > cfg.tol_push:
                violations.append(
                    f"angle {tau} at level {b:.4g}: image off the target ray by {err:.3g}")
        checked += 1
    if checked < cfg.rays:
        violations.append(f"only {checked} of {cfg.rays} rays were traceable")
    return checked, violations, worst


def _suite_semiconjugacy(ctx: _Context, rng: random.Random) -> _Result:
    """sigma_m(p(tau)) = p(sigma_D(tau)), exact, on the full D^k - 1 grid."""
    fa, cfg = ctx.fa, ctx.cfg
    den, members = ctx.member_grid(cfg.grid_k)
    violations: list[str] = []
    checked = 0
    for num, p in members.items():
        img = num * fa.D % den
        p_img = members.get(img)
        if p_img is None:
            violations.append(f"{num}/{den}: image left the member set")
            continue
        if wrap(fa.m * p) != p_img:
            violations.append(
                f"{num}/{den}: p fails to intertwine the circle maps "
                f"({wrap(fa.m * p)} expected, {p_img} found)")
        checked += 1
    return checked, violations, "0" if not violations else "1"


def _suite_monotonicity(ctx: _Context, rng: random.Random) -> _Result:
    """The extension is cyclically monotone and winds exactly once."""
    fa, cfg = ctx.fa, ctx.cfg
    N = cfg.mono_grid
    values = [extend_p(fa, Angle(Fraction(j, N))).turns for j in range(N)]
    total = Fraction(0)
    largest = Fraction(0)
    for j in range(N):
        step = wrap(values[(j + 1) % N] - values[j])
        total += step
        largest = max(largest, step)
    violations: list[str] = []
    if total != 1:
        violations.append(f"winding number {total}, expected exactly 1")
    return N, violations, f"max step {float(largest):.6g}"


def _suite_surjectivity(ctx: _Context, rng: random.Random) -> _Result:
    """Every base-m rational has a member preimage that maps back exactly."""
    fa, cfg = ctx.fa, ctx.cfg
    den = fa.m ** cfg.grid_k - 1
    violations: list[str] = []
    checked = 0
    for num in range(den):
        t = Angle(Fraction(num, den))
        for tau in p_preimage(fa, t):
            verdict = membership(fa, tau)
            if not verdict.is_member:
                violations.append(f"preimage {tau} of {t} is not a member")
                continue
            back = digits_value(
                verdict.digits_preperiod, verdict.digits_period, fa.m)
            if back != t.turns:
                violations.append(f"round trip through {tau} returns {back}, not {t}")
            checked += 1
    return checked, violations, "0" if not violations else "1"


def _suite_gap_constancy(ctx: _Context, rng: random.Random) -> _Result:
    """Both one-sided limits agree across every hole of every level cover."""
    fa, cfg = ctx.fa, ctx.cfg
    violations: list[str] = []
    checked = 0
    for n in range(cfg.grid_k + 1):
        for lo, hi in level_holes(fa, n):
            vr = digits_value(*one_sided_digits(fa, lo, SIDE_RIGHT), fa.m)
            vl = digits_value(*one_sided_digits(fa, hi, SIDE_LEFT), fa.m)
            mid = wrap(lo + wrap(hi - lo) / 2)
            vm = extend_p(fa, Angle(mid)).turns
            if not vr == vl == vm:
                violations.append(
                    f"level {n} hole ({lo}, {hi}): one-sided values {vr} / {vl}, "
                    f"interior value {vm}")
            checked += 1
    return checked, violations, "0" if not violations else "1"


def _suite_cover_measure(ctx: _Context, rng: random.Random) -> _Result:
    """Closed-form cover length, cross-checked by enumerating the arcs."""
    fa, cfg = ctx.fa, ctx.cfg
    violations: list[str] = []
    checked = 0
    ratio = Fraction(fa.m, fa.D)
    for n in range(cfg.grid_k + 5):
        formula = level_cover_measure(fa, n)
        if formula != fa.complement_length * ratio ** n:
            violations.append(f"level {n}: closed form drifted to {formula}")
        checked += 1
    for n in range(cfg.grid_k + 1):
        total = sum((b - a for a, b in level_arcs(fa, n)), Fraction(0))
        if total != level_cover_measure(fa, n):
            violations.append(
                f"level {n}: enumerated length {total} != formula "
                f"{level_cover_measure(fa, n)}")
        checked += 1
    return checked, violations, "0" if not violations else "1"


def _orbit_near_gap_endpoint(fa: FundamentalArcs, t: Fraction, depth: int) -> bool:
    g1, g2 = fa.gap
    x = t
    for _ in range(depth + 1):
        if circ_dist(x, g1) <= _BOUNDARY_BAND or circ_dist(x, g2) <= _BOUNDARY_BAND:
            return True
        x = wrap(fa.D * x)
    return False


def _suite_cross_validation(ctx: _Context, rng: random.Random) -> _Result:
    """Exact and numeric membership verdicts on random rational angles.

    Abstentions are allowed only when the exact orbit really does pass
    within the boundary band of a gap endpoint, and the agreement rate
    over the whole sample must stay at 99% or better.
    """
    P, ren, fa, geo, cfg = ctx.P, ctx.ren, ctx.fa, ctx.geo, ctx.cfg
    violations: list[str] = []
    agree = 0
    for _ in range(cfg.samples):
        den = rng.randint(2, cfg.den_max)
        tau = Angle(Fraction(rng.randint(0, den - 1), den))
        exact = membership(fa, tau)
        numeric = membership_numeric(P, ren, fa, tau, depth=cfg.depth, geometry=geo)
        if numeric.status == BOUNDARY_UNCERTAIN:
            # abstentions are only legitimate right at the precision floor
            if not _orbit_near_gap_endpoint(fa, tau.turns, cfg.depth):
                violations.append(
                    f"{tau}: abstained although the orbit keeps its distance")
            continue
        if numeric.status != exact.status:
            # the numeric verdict is depth-relative: an orbit that only
            # falls out after the last certified level reads as a member
            late = (exact.status == EXCLUDED
                    and exact.excluded_at_step is not None
                    and exact.excluded_at_step > cfg.depth)
            if not late:
                violations.append(
                    f"{tau}: exact says {exact.status}, numeric says {numeric.status}")
            continue
        if exact.is_member:
            if (numeric.digits_preperiod, numeric.digits_period) != (
                    exact.digits_preperiod, exact.digits_period):
                violations.append(f"{tau}: members disagree on the digit stream")
                continue
        elif numeric.excluded_at_step != exact.excluded_at_step:
            violations.append(
                f"{tau}: exclusion steps differ "
                f"({exact.excluded_at_step} exact, {numeric.excluded_at_step} numeric)")
            continue
        agree += 1
    rate = agree / cfg.samples if cfg.samples else 1.0
    if rate < 0.99:
        violations.append(f"agreement rate {rate:.4f} fell below 0.99")
    return cfg.samples, violations, 1.0 - rate


def _suite_fibers(ctx: _Context, rng: random.Random) -> _Result:
    """Classify every multi-point fiber of p over the exact grid."""
    P, ren, fa, cfg = ctx.P, ctx.ren, ctx.fa, ctx.cfg
    den, members = ctx.member_grid(cfg.grid_k)
    entries = [PMapEntry(tau=Angle(Fraction(num, den)), p_value=Angle(p))
               for num, p in sorted(members.items())]

    def deep_trace(a: Angle):
        # deep enough that a repelling landing point pins the estimate:
        # the approach rate is b^(log lambda / log d), slow for mild multipliers
        return trace_ray(P, a, b_start=cfg.b_start, b_end=1e-10, substeps=6)

    fibers = fiber_classify(entries, P, ren, fa,
                            hole_depth=cfg.grid_k, trace=deep_trace)
    worst = 0.0
    multi = 0
    for f in fibers:
        if len(f.taus) > 1:
            multi += 1
        spread = f.evidence.get("landing_spread")
        if spread is not None:
            worst = max(worst, float(spread))
    violations: list[str] = []
    if multi == 0:
        violations.append("no multi-point fiber found over the grid")
    return len(fibers), violations, worst


def _suite_rotation(ctx: _Context, rng: random.Random) -> _Result:
    """Re-anchoring the digit origin shifts p by a constant in (m-1)-ths."""
    fa, cfg = ctx.fa, ctx.cfg
    sample = [Angle(wrap(fa.fixed_angle(j))) for j in range(fa.m)]
    small = fa.m ** min(cfg.grid_k, 4) - 1
    for num in range(1, min(small, 40)):
        sample.extend(p_preimage(fa, Angle(Fraction(num, small))))
    shifts = []
    for j in range(fa.m):
        alt = Angle(wrap(fa.fixed_angle(j)))
        shifts.append(rotation_check(fa, alt, sample))
    label = ",".join(str(s) for s in shifts)
    return fa.m * len(sample), [], f"shifts {label}"


def _suite_nest_levels(ctx: _Context, rng: random.Random) -> _Result:
    """Member-ray crossings sit at b0/D^k; the deep boundary is crossed once."""
    P, ren, fa, geo, cfg = ctx.P, ctx.ren, ctx.fa, ctx.geo, ctx.cfg
    taus = [Angle(wrap(fa.fixed_angle(j))) for j in range(fa.m)]
    levels = [(k, ren.b0 / ren.D ** k) for k in range(cfg.grid_k + 1)]
    violations: list[str] = []
    worst = 0.0
    checked = 0
    for tau in taus:
        tr = trace_ray(P, tau, b_start=cfg.b_start, b_end=levels[-1][1] * 0.5,
                       extra_levels=levels)
        found = {k: z for k, _, z in tr.nest_crossings}
        for k, b in levels:
            z = found.get(k)
            if z is None:
                violations.append(f"ray {tau}: no crossing recorded at depth {k}")
                continue
            rel = abs(green_potential(P, z).value / b - 1.0)
            worst = max(worst, rel)
            if rel > cfg.tol_level:
                violations.append(
                    f"ray {tau} depth {k}: potential off by a relative {rel:.3g}")
            checked += 1
    verify_p2(P, ren, fa, geometry=geo, taus=taus)
    return checked, violations, worst


_SUITES: tuple[tuple[str, Callable[[_Context, random.Random], _Result]], ...] = (
    ("poly_core", _suite_poly_core),
    ("ray_push_forward", _suite_push_forward),
    ("semiconjugacy", _suite_semiconjugacy),
    ("monotonicity", _suite_monotonicity),
    ("surjectivity", _suite_surjectivity),
    ("gap_constancy", _suite_gap_constancy),
    ("cover_measure", _suite_cover_measure),
    ("cross_validation", _suite_cross_validation),
    ("fiber_classification", _suite_fibers),
    ("rotation_check", _suite_rotation),
    ("nest_levels", _suite_nest_levels),
)


def _residual_text(worst: float | str) -> str:
    if isinstance(worst, str):
        return worst
    return f"{worst:.6g}"


def verify_all(config: RunConfig, P: Polynomial | None = None,
               ctx: _Context | None = None) -> dict:
    """Run every suite and assemble the report.

    A suite that raises a theorem violation is reported as failed with
    the offending object serialized; unrelated suites still run.  Errors
    before any suite starts (undetectable renormalization, unreadable
    polynomial) propagate to the caller.
    """
    if ctx is None:
        ctx = build_context(config, P)
    suites = []
    for name, fn in _SUITES:
        rng = random.Random(f"{config.seed}:{name}")
        try:
            checked, violations, worst = fn(ctx, rng)
        except TheoremViolation as exc:
            suites.append({"name": name, "pass": False, "checked": 0,
                           "violations": [f"theorem violation: {exc}"],
                           "worst_residual": "inf"})
            continue
        except (DomainError, PrecisionError) as exc:
            suites.append({"name": name, "pass": False, "checked": 0,
                           "violations": [f"suite error: {exc}"],
                           "worst_residual": "inf"})
            continue
        suites.append({"name": name, "pass": not violations, "checked": checked,
                       "violations": violations,
                       "worst_residual": _residual_text(worst)})
    return {"suites": suites, "config": config.echo()}


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
