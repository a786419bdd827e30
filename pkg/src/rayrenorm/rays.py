"""External-ray tracing by potential-ladder continuation.

A ray is followed from high potential toward the filled Julia set by
Newton steps: at potential b the ray point solves P^n(z) = Z where Z is
the asymptotic target at potential d^n·b and angle d^n·τ, with n chosen
to push the target into the regime where the escape coordinate is a
small perturbation of z itself.  Angles are iterated as exact rationals;
floats appear only in the final Newton targets.

Rays whose forward angle orbit meets the angle of a ray through an
escaping critical point stop at the corresponding precritical point (a
crash).  A side tag continues past the crash along angles perturbed off
the crash angle, shrinking the perturbation with the potential; this
approximates the one-sided limit of nearby smooth rays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .angles import SIDE_LEFT, SIDE_NONE, Angle, wrap
from .errors import DomainError, InsufficientDepth, PrecisionError
from .poly import Polynomial, classify_criticals, external_angle, green_potential

B_ASYM = 25.0            # potential above which the escape coordinate is direct
_CRASH_ANGLE_TOL = 1e-9  # matching tolerance against crash-angle candidates
LANDING_DIAM_TOL = 1e-4  # tail diameter below which a trace counts as landed

STATUS_LANDED = "landed"
STATUS_CRASHED = "crashed_unresolved"
STATUS_TRUNCATED = "truncated"


@dataclass(frozen=True)
class RayTrace:
    angle: Angle
    samples: tuple[tuple[float, complex], ...]
    crash: tuple[float, complex, int] | None
    nest_crossings: tuple[tuple[int, float, complex], ...]
    landing: tuple[complex, float] | None
    status: str


def _log_escape(P: Polynomial, z: complex, need: float = 1e8
                ) -> tuple[complex, complex, int]:
    """(L(z), L'(z), n) with L = log of the escape coordinate.

    Sums log(w_{k+1} / w_k^d) over the orbit until the term is negligible;
    only valid once |z| is already large (the caller guarantees it).
    """
    d = P.degree
    w = z
    dw = 1 + 0j
    L = _clog(z)
    dL = 1 / z
    scale = 1.0
    n = 0
    # w**d must stay within float range on the next pass
    w_cap = 10.0 ** (300.0 / d)
    for _ in range(64):
        if abs(w) > w_cap:
            break
        pw = P(w)
        dpw = P.deriv(w) * dw
        ratio = pw / w ** d
        if abs(ratio - 1) > 0.5:
            raise PrecisionError("orbit not yet in the asymptotic regime")
        scale /= d
        term = scale * _clog(ratio)
        L = L + term
        dL = dL + scale * (dpw / pw - d * dw / w)
        w, dw = pw, dpw
        n += 1
        if abs(ratio - 1) < 1e-14:
            break  # below this the log is rounding noise
    return L, dL, n


def _clog(z: complex) -> complex:
    return complex(math.log(abs(z)), math.atan2(z.imag, z.real))


def bottcher_target(P: Polynomial, theta: float, b: float) -> complex:
    """The point at potential b and angle theta (turns), for b ≥ B_ASYM.

    Newton on the log escape coordinate from the crude seed exp(b + 2πiθ);
    converges to residual below 1e−12 in a few steps at these heights.
    """
    if b < B_ASYM - 1e-9:
        raise DomainError(f"potential {b} below the asymptotic threshold {B_ASYM}")
    zeta = complex(b, 2 * math.pi * (theta % 1.0))
    z = _cexp(zeta)
    for _ in range(40):
        L, dL, _ = _log_escape(P, z)
        diff = L - zeta
        # pull the angle difference to the nearest branch
        diff = complex(diff.real, _wrap_rad(diff.imag))
        if abs(diff) < 1e-13:
            return z
        z = z - diff / dL
    raise PrecisionError("escape-coordinate Newton did not converge")


def _cexp(zeta: complex) -> complex:
    return math.exp(zeta.real) * complex(math.cos(zeta.imag), math.sin(zeta.imag))


def _wrap_rad(x: float) -> float:
    twopi = 2 * math.pi
    x = math.fmod(x, twopi)
    if x > math.pi:
        x -= twopi
    elif x < -math.pi:
        x += twopi
    return x


def rationalize(x: float, den_max: int = 10 ** 6, tol: float = 1e-9) -> Fraction:
    """Snap a measured angle to the nearest small rational or fail loudly."""
    f = Fraction(x).limit_denominator(den_max)
    if abs(float(f) - x) > tol:
        raise PrecisionError(
            f"value {x!r} is not convincingly rational below denominator {den_max}")
    return wrap(f)


# pair data resolved per polynomial, keyed by coefficients; the list is
# registered before it is filled so traces made during detection see the
# pairs of the criticals already done and nothing else
_PAIR_CACHE: dict[tuple, list[tuple[float, complex, Fraction, Fraction]]] = {}


def crash_pair_data(P: Polynomial
                    ) -> list[tuple[float, complex, Fraction, Fraction]]:
    """(potential, point, angle, angle) for each escaping critical point.

    Among the d σ-preimages of the critical value angle only two strands
    end at a simple critical point; the rest pass through regular
    preimages of the critical value.  The two are singled out by tracing
    every candidate to just above the critical potential and keeping the
    pair that approaches the point.  Criticals are resolved from the
    highest potential down.
    """
    key = P.coeffs
    hit = _PAIR_CACHE.get(key)
    if hit is not None:
        return hit
    entries = _PAIR_CACHE[key] = []
    try:
        escaping, _ = classify_criticals(P)
        d = P.degree
        for datum in sorted(escaping, key=lambda cd: -cd.potential):
            c = datum.point
            tv = rationalize(external_angle(P, P(c)))
            dists = []
            for j in range(d):
                cand = wrap(Fraction(tv + j, d))
                # stop 1% above the stopping potential: close enough to
                # tell the two crashing rays apart, far enough that the
                # ladder conditioning does not collapse at the point
                tr = trace_ray(P, Angle(cand), b_start=2.0,
                               b_end=datum.potential * 1.01, substeps=6)
                dists.append((abs(tr.samples[-1][1] - c), cand))
            dists.sort(key=lambda t: t[0])
            if len(dists) > 2 and dists[1][0] > 0.25 * dists[2][0]:
                raise PrecisionError(
                    "crash pair not separated from the other preimage rays")
            t1, t2 = sorted((dists[0][1], dists[1][1]))
            entries.append((datum.potential, c, t1, t2))
    except BaseException:
        del _PAIR_CACHE[key]
        raise
    return entries


def _predict_crash(P: Polynomial, tau: Fraction, b_lo: float, b_hi: float,
                   pairs: Sequence[tuple[float, complex, Fraction, Fraction]]
                   ) -> tuple[float, complex, int] | None:
    """Earliest (highest-potential) crash of the ray of angle tau.

    The ray stops at a depth-n preimage of an escaping critical point c
    exactly when σ^n(τ) is one of the two angles crashing at c itself and
    the potentials line up.  Matching is done in floats and confirmed by
    the Newton solve at trace time.
    """
    d = P.degree
    best: tuple[float, complex, int] | None = None
    for u_c, c, t1, t2 in pairs:
        t = tau
        n = 0
        while True:
            bc = u_c / d ** n
            if bc < b_lo * (1 - 1e-12):
                break
            for tp in (t1, t2):
                dist = abs(float(t) - float(tp))
                dist = min(dist, 1 - dist)
                if dist < _CRASH_ANGLE_TOL and bc <= b_hi * (1 + 1e-12):
                    if best is None or bc > best[0]:
                        best = (bc, c, n)
            t = wrap(d * t)
            n += 1
            if n > 80:
                break
    return best


def _rung_schedule(b_start: float, b_end: float, substeps: int,
                   extra: Iterable[float]) -> list[float]:
    if not (b_start > b_end > 0):
        raise DomainError("need b_start > b_end > 0")
    if substeps < 1:
        raise DomainError("substeps must be positive")
    rungs = []
    j = 0
    while True:
        b = b_start * 2.0 ** (-j / substeps)
        if b <= b_end:
            break
        rungs.append(b)
        j += 1
    rungs.append(b_end)
    for b in extra:
        if b_end <= b <= b_start:
            rungs.append(float(b))
    rungs = sorted(set(rungs), reverse=True)
    return rungs


def _newton_rung(P: Polynomial, n: int, target: complex, seed: complex) -> complex:
    """Solve P^n(z) = target by Newton from seed, to machine accuracy."""
    z = seed
    for _ in range(80):
        w = z
        dw = 1 + 0j
        for _ in range(n):
            dw = P.deriv(w) * dw
            w = P(w)
        step = (w - target) / dw
        z = z - step
        if abs(step) <= 1e-15 * max(1.0, abs(z)):
            return z
    raise PrecisionError("ladder Newton did not converge")


def _descend_to(P: Polynomial, target_asym: complex, theta: Fraction | float,
                b: float, n: int, seed: complex | None) -> complex:
    """Ray point at potential b: solve P^n(z) = target_asym near the seed.

    Without a seed the point is built by pulling d-th roots down from the
    asymptotic height, selecting the root closest to the wanted angle.
    """
    d = P.degree
    if seed is not None:
        return _newton_rung(P, n, target_asym, seed)
    w = target_asym
    for k in range(n, 0, -1):
        # angle of the ray at this intermediate height, in turns
        t_here = float(wrap(Fraction(d) ** (k - 1) * Fraction(theta))) if isinstance(
            theta, Fraction) else (float(theta) * d ** (k - 1)) % 1.0
        r = abs(w) ** (1.0 / d)
        base = math.atan2(w.imag, w.real) / d
        cands = [r * complex(math.cos(base + 2 * math.pi * i / d),
                             math.sin(base + 2 * math.pi * i / d))
                 for i in range(d)]
        want = 2 * math.pi * t_here
        pick = min(cands, key=lambda x: abs(_wrap_rad(math.atan2(x.imag, x.real) - want)))
        w = _newton_rung(P, 1, w, pick)
    return w


def _asym_depth(d: int, b: float) -> int:
    n = 0
    while b < B_ASYM:
        b *= d
        n += 1
    return n


def trace_ray(P: Polynomial, tau: Angle, b_start: float = 2.0,
              b_end: float = 1e-8, substeps: int = 4, *,
              extra_levels: Iterable[tuple[int, float]] = (),
              ) -> RayTrace:
    """Follow the external ray of angle tau from b_start down to b_end.

    extra_levels: (label, potential) pairs forced onto the rung schedule;
    pairs with a nonnegative label are reported as nest crossings.  A ray
    whose angle orbit meets a crash angle stops at the precritical point
    (status crashed_unresolved) unless tau carries a side tag, in which
    case the trace continues along the one-sided limit.
    """
    d = P.degree
    t0 = tau.turns
    crash = _predict_crash(P, t0, b_end, math.inf, crash_pair_data(P))
    if crash is not None and crash[0] >= b_start:
        raise DomainError(
            f"ray {tau} stops at potential {crash[0]:.6g}, above b_start")
    labeled = {}
    for k, b in extra_levels:
        labeled.setdefault(float(b), k)
    rungs = _rung_schedule(b_start, b_end, substeps, labeled.keys())

    samples: list[tuple[float, complex]] = []
    crossings: list[tuple[int, float, complex]] = []
    crash_rec: tuple[float, complex, int] | None = None
    status = STATUS_LANDED
    z: complex | None = None
    side_sign = 0
    if tau.side != SIDE_NONE:
        side_sign = -1 if tau.side == SIDE_LEFT else +1

    past_crash = False
    for b in rungs:
        branch_from: complex | None = None
        if crash is not None and not past_crash:
            bc, c, ncr = crash
            if b <= bc * (1 + 1e-12):
                # resolve the crash point itself before (maybe) continuing
                zc = _confirm_crash(P, z, c, ncr)
                if zc is not None:
                    crash_rec = (bc, zc, ncr)
                    samples.append((bc, zc))
                    past_crash = True
                    branch_from = zc
                    if side_sign == 0:
                        status = STATUS_CRASHED
                        break
                else:
                    crash = None  # near miss, keep tracing the plain ray
        n = _asym_depth(d, b)
        scaled = b * d ** n
        theta_img = float(wrap(Fraction(d) ** n * t0))
        target = bottcher_target(P, theta_img, scaled)
        if branch_from is not None:
            z = _pick_branch(P, n, target, z, branch_from, ncr, side_sign)
        else:
            z = _descend_to(P, target, t0, b, n, z)
        samples.append((b, z))
        k = labeled.get(b)
        if k is not None and k >= 0:
            crossings.append((k, b, z))

    landing = None
    if status != STATUS_CRASHED:
        try:
            landing = land_estimate_samples(samples, window=b_end * 8.01)
            if landing[1] >= LANDING_DIAM_TOL:
                status = STATUS_TRUNCATED
        except InsufficientDepth:
            status = STATUS_TRUNCATED
    return RayTrace(angle=tau, samples=tuple(samples), crash=crash_rec,
                    nest_crossings=tuple(crossings), landing=landing,
                    status=status)


def _sibling_root(P: Polynomial, m: int, za: complex, zc: complex) -> complex:
    """Second local solution of P^m(z) = P^m(za) near the branch point zc.

    P^m has a critical point at zc, so the value is taken twice nearby;
    deflating the known root za out of the equation turns the sibling into
    a regular root whose Newton basin covers the reflected seed.
    """
    w_img = za
    for _ in range(m):
        w_img = P(w_img)
    z = 2 * zc - za
    for _ in range(60):
        w = z
        dw = 1 + 0j
        for _ in range(m):
            dw = P.deriv(w) * dw
            w = P(w)
        g = w - w_img
        denom = z - za
        if denom == 0:
            raise PrecisionError("sibling strand collapsed onto the first")
        step = g / (dw - g / denom)
        z = z - step
        if abs(step) <= 1e-15 * max(1.0, abs(z)):
            return z
    raise PrecisionError("sibling strand Newton did not converge")


def _pick_branch(P: Polynomial, n: int, target: complex, z_hi: complex,
                 zc: complex, ncr: int, side_sign: int) -> complex:
    """Pick the one-sided strand just below a ray crash.

    Both continuations of a crashed ray solve the same ladder equation and
    agree on every forward measurement, so the choice is purely local.  In
    a conformal chart at the meeting point the potential is a branched
    double cover and the counterclockwise-side continuation leaves at a
    right angle clockwise from the incoming direction, the other side
    mirrored.
    """
    za = _newton_rung(P, n, target, z_hi)
    zb = _sibling_root(P, ncr + 1, za, zc)
    v_in = zc - z_hi
    if abs(za - zb) <= 1e-9 * max(1.0, abs(zc)) or abs(v_in) == 0:
        raise PrecisionError("one-sided strands did not separate")
    picked = [cand for cand in (za, zb)
              if (v_in.conjugate() * (cand - zc)).imag * side_sign < 0]
    if len(picked) != 1:
        raise PrecisionError("one-sided continuation direction is ambiguous")
    return picked[0]


def _confirm_crash(P: Polynomial, z_near: complex | None, c: complex, n: int
                   ) -> complex | None:
    """Newton for the depth-n preimage of the critical point near the ray."""
    if z_near is None:
        return None
    z = z_near
    for _ in range(80):
        w = z
        dw = 1 + 0j
        for _ in range(n):
            dw = P.deriv(w) * dw
            w = P(w)
        if abs(dw) == 0:
            return None
        step = (w - c) / dw
        z = z - step
        if abs(step) <= 1e-14 * max(1.0, abs(z)):
            break
    else:
        return None
    if abs(z - z_near) > 0.5 * max(1.0, abs(z_near)):
        return None  # converged somewhere unrelated to the ray
    return z


def land_estimate_samples(samples: Sequence[tuple[float, complex]],
                          window: float) -> tuple[complex, float]:
    pts = [z for b, z in samples if b <= window]
    if not pts:
        raise InsufficientDepth(
            f"no ray samples below potential {window:.3e}")
    cx = sum(p.real for p in pts) / len(pts)
    cy = sum(p.imag for p in pts) / len(pts)
    center = complex(cx, cy)
    diam = max((abs(p - q) for p in pts for q in pts), default=0.0)
    return center, diam


def land_estimate(trace: RayTrace, window: float = 1e-9) -> tuple[complex, float]:
    """Centroid and diameter of the trace samples below the given potential."""
    return land_estimate_samples(trace.samples, window)


def equipotential_component(P: Polynomial, b: float, seed: complex,
                            n_points: int = 4096) -> list[complex]:
    """March one closed component of {u = b} starting near seed.

    Predictor steps follow the level-curve tangent, corrector steps pull
    back along the gradient of u.  Levels within a relative 1e−3 of the
    forward potentials u(c)/d^k of an escaping critical point are refused:
    the curve is singular or nearly pinched there.  Returns n_points
    vertices resampled to uniform arclength, counterclockwise.
    """
    d = P.degree
    escaping, _ = classify_criticals(P)
    for datum in escaping:
        lev = datum.potential
        for _ in range(80):
            if abs(b - lev) <= 1e-3 * b:
                raise DomainError(
                    f"equipotential level {b:.6g} too close to a singular level {lev:.6g}")
            lev /= d
            if lev < b / 8:
                break
    start = _correct_to_level(P, seed, b)
    # step length from a crude circumference estimate, capped by the
    # local distance-to-filled-set scale b/|grad| so small components
    # are not overstepped, then halved until the march closes with
    # enough steps to resolve the loop
    _, g0 = _green_grad(P, start)
    h = min(2 * math.pi * max(abs(start), 1e-6) / max(n_points, 256),
            0.25 * b / abs(g0))
    for _ in range(14):
        try:
            pts = _march_loop(P, b, start, h)
        except (PrecisionError, DomainError):
            pts = None
        if pts is not None and len(pts) >= max(n_points // 4, 64):
            pts.append(start)
            # chord interpolation sags off the level set; pull each
            # resampled vertex back onto it
            return [_correct_to_level(P, q, b)
                    for q in _resample_closed(pts, n_points)]
        h /= 2
    raise PrecisionError("equipotential march did not close")


def _march_loop(P: Polynomial, b: float, start: complex, h: float
                ) -> list[complex] | None:
    z = start
    pts = [z]
    max_steps = 100000
    for i in range(max_steps):
        _, grad = _green_grad(P, z)
        z_pred = z + h * 1j * grad / abs(grad)
        z = _correct_to_level(P, z_pred, b)
        pts.append(z)
        if i >= 8 and abs(z - start) < 0.75 * h:
            return pts
    return None


def _green_grad(P: Polynomial, z: complex) -> tuple[float, complex]:
    """(u(z), ∇u(z)) with the gradient as a complex vector."""
    d = P.degree
    w = z
    dw = 1 + 0j
    n = 0
    while abs(w) < 1e8:
        dw = P.deriv(w) * dw
        w = P(w)
        n += 1
        if n > 2048 or abs(w) > 1e100:
            break
    if abs(w) < 2:
        raise DomainError("point does not escape; no gradient available")
    u = math.log(abs(w)) / d ** n
    grad = (dw / w).conjugate() / d ** n
    return u, grad


def _correct_to_level(P: Polynomial, z: complex, b: float) -> complex:
    # tolerance floored at the float noise of the orbit-log computation
    tol = max(2e-14, 1e-12 * b)
    for _ in range(60):
        u, grad = _green_grad(P, z)
        err = u - b
        if abs(err) <= tol:
            return z
        z = z - err * grad / abs(grad) ** 2
    raise PrecisionError("level-set corrector did not converge")


def _resample_closed(pts: Sequence[complex], n: int) -> list[complex]:
    # cumulative arclength, then n equally spaced points along the loop
    acc = [0.0]
    for a, c in zip(pts, pts[1:]):
        acc.append(acc[-1] + abs(c - a))
    total = acc[-1]
    if total == 0:
        raise PrecisionError("degenerate equipotential loop")
    out = []
    j = 0
    for i in range(n):
        s = total * i / n
        while acc[j + 1] < s:
            j += 1
        seg = acc[j + 1] - acc[j]
        lam = 0.0 if seg == 0 else (s - acc[j]) / seg
        out.append(pts[j] * (1 - lam) + pts[j + 1] * lam)
    return out


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:.17g}"


def trace_to_json_dict(tr: RayTrace) -> dict:
    t = tr.angle.turns
    return {
        "angle": f"{t.numerator}/{t.denominator}",
        "side": tr.angle.side,
        "status": tr.status,
        "samples": [[_fmt(b), z.real, z.imag] for b, z in tr.samples],
        "crash": None if tr.crash is None else {
            "potential": _fmt(tr.crash[0]),
            "point": [tr.crash[1].real, tr.crash[1].imag],
            "depth": tr.crash[2],
        },
        "nest_crossings": [[k, _fmt(b), z.real, z.imag]
                           for k, b, z in tr.nest_crossings],
        "landing": None if tr.landing is None else {
            "point": [tr.landing[0].real, tr.landing[0].imag],
            "tail_diameter": _fmt(tr.landing[1]),
        },
    }


def trace_from_json_dict(obj: dict) -> RayTrace:
    crash = obj.get("crash")
    landing = obj.get("landing")
    side = obj.get("side", SIDE_NONE)
    return RayTrace(
        angle=Angle(Fraction(obj["angle"]), side),
        samples=tuple((float(b), complex(x, y)) for b, x, y in obj["samples"]),
        crash=None if crash is None else
            (float(crash["potential"]),
             complex(crash["point"][0], crash["point"][1]),
             int(crash["depth"])),
        nest_crossings=tuple((int(k), float(b), complex(x, y))
                             for k, b, x, y in obj["nest_crossings"]),
        landing=None if landing is None else
            (complex(landing["point"][0], landing["point"][1]),
             float(landing["tail_diameter"])),
        status=obj["status"],
    )
