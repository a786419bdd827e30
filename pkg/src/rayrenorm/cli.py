"""Command-line surface: detections, verification runs, datasets, figures.

Exit codes: 0 success, 1 domain errors (undetectable renormalization,
unreadable input, non-member angles), 2 usage errors, 3 theorem
violations.  File outputs are written to a temporary name and renamed,
so a failing run never leaves a partial file behind.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .angles import Angle
from .errors import DomainError, PrecisionError, TheoremViolation
from .pmap import build_arcs, compute_p, digits_value, membership, p_preimage
from .poly import external_angle, green_potential
from .rays import trace_ray, trace_to_json_dict
from .renorm import (build_renormalization, main_crash_pair, nest_probe,
                     renorm_to_json_dict)
from .render import render_document
from .verify import RunConfig, load_polynomial, report_to_json, verify_all

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2
EXIT_VIOLATION = 3


def _atomic_write(path: str, text: str) -> None:
    p = Path(path)
    tmp = p.with_name(p.name + ".tmp")
    try:
        tmp.write_text(text)
        os.replace(tmp, p)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


def _emit(text: str, out: str | None) -> None:
    if out:
        _atomic_write(out, text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _parse_point(text: str) -> complex:
    try:
        re_s, im_s = text.split(",")
        return complex(float(re_s), float(im_s))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"point must be RE,IM (got {text!r})") from exc


def _parse_angle(text: str) -> Angle:
    try:
        return Angle.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _arcs_context(P):
    ren = build_renormalization(P)
    fa = build_arcs(ren, main_crash_pair(ren), nest_probe(P, ren))
    return ren, fa


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_poly_green(args) -> int:
    P = load_polynomial(args.poly)
    g = green_potential(P, args.point)
    _emit(f"{g.value:.17g}", args.out)
    return EXIT_OK


def _cmd_poly_angle(args) -> int:
    P = load_polynomial(args.poly)
    theta = external_angle(P, args.point)
    _emit(f"{theta:.17g}", args.out)
    return EXIT_OK


def _cmd_ray_trace(args) -> int:
    P = load_polynomial(args.poly)
    tr = trace_ray(P, args.angle, b_start=args.b_start, b_end=args.b_end)
    _emit(json.dumps(trace_to_json_dict(tr), indent=2, sort_keys=True) + "\n",
          args.out)
    return EXIT_OK


def _cmd_renorm_detect(args) -> int:
    P = load_polynomial(args.poly)
    ren = build_renormalization(P)
    _emit(json.dumps(renorm_to_json_dict(ren), indent=2, sort_keys=True) + "\n",
          args.out)
    return EXIT_OK


def _lambda_rows(fa, angles) -> list[str]:
    rows = []
    for tau in angles:
        v = membership(fa, tau)
        if v.is_member:
            pre = "".join(map(str, v.digits_preperiod))
            per = "".join(map(str, v.digits_period))
            p = digits_value(v.digits_preperiod, v.digits_period, fa.m)
            rows.append(f"{tau},member,,{pre},{per},"
                        f"{p.numerator}/{p.denominator}")
        else:
            rows.append(f"{tau},excluded,{v.excluded_at_step},,,")
    return rows


def _cmd_lambda_sample(args) -> int:
    P = load_polynomial(args.poly)
    _, fa = _arcs_context(P)
    angles: list[Angle] = []
    # the largest exact grid D^k - 1 that the denominator cap allows
    k = 0
    while k < 8 and fa.D ** (k + 1) - 1 <= args.den_max:
        k += 1
    if k:
        den = fa.D ** k - 1
        angles.extend(Angle(Fraction(num, den)) for num in range(den))
    rng = random.Random(f"{args.seed}:lambda")
    for _ in range(10 ** 4):
        den = rng.randint(2, args.den_max)
        angles.append(Angle(Fraction(rng.randint(0, den - 1), den)))
    header = "angle,verdict,excluded_step,digits_preperiod,digits_period,p_value"
    text = "\n".join([header] + _lambda_rows(fa, angles)) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def _cmd_pmap_eval(args) -> int:
    P = load_polynomial(args.poly)
    _, fa = _arcs_context(P)
    p = compute_p(fa, args.angle)
    _emit(str(p), args.out)
    return EXIT_OK


def _cmd_pmap_preimage(args) -> int:
    P = load_polynomial(args.poly)
    _, fa = _arcs_context(P)
    taus = p_preimage(fa, args.angle)
    _emit("\n".join(str(t) for t in taus), args.out)
    return EXIT_OK


def _cmd_verify_all(args) -> int:
    config = RunConfig(poly=args.poly, seed=args.seed, depth=args.depth,
                       den_max=args.den_max, out=args.out or "")
    report = verify_all(config)
    _emit(report_to_json(report), args.out)
    if all(s["pass"] for s in report["suites"]):
        return EXIT_OK
    return EXIT_VIOLATION


def _cmd_plot_rays(args) -> int:
    config = RunConfig(poly=args.poly, seed=args.seed, rays=args.rays,
                       b_start=args.b_start, b_end=args.b_end,
                       out=args.out or "")
    _emit(render_document(config), args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# grammar
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rayrenorm",
        description="external rays, renormalization nests, exact angle sets")
    groups = parser.add_subparsers(dest="group", required=True)

    def sub(group, verb, handler, **flag_spec):
        p = group.add_parser(verb)
        p.add_argument("--poly", required=True,
                       help="polynomial JSON file (or inline JSON)")
        for flag, kwargs in flag_spec.items():
            p.add_argument(flag, **kwargs)
        p.add_argument("--out", default=None, help="output path (atomic write)")
        p.set_defaults(handler=handler)
        return p

    angle_kw = {"type": _parse_angle, "required": True,
                "help": "exact rational angle p/q, optional :left / :right"}
    point_kw = {"type": _parse_point, "required": True, "help": "point RE,IM"}

    poly = groups.add_parser("poly")
    poly_verbs = poly.add_subparsers(dest="verb", required=True)
    sub(poly_verbs, "green", _cmd_poly_green, **{"--point": point_kw})
    sub(poly_verbs, "angle", _cmd_poly_angle, **{"--point": point_kw})

    ray = groups.add_parser("ray")
    ray_verbs = ray.add_subparsers(dest="verb", required=True)
    sub(ray_verbs, "trace", _cmd_ray_trace, **{
        "--angle": angle_kw,
        "--b-start": {"type": float, "default": 2.0},
        "--b-end": {"type": float, "default": 1e-6},
    })

    renorm = groups.add_parser("renorm")
    renorm_verbs = renorm.add_subparsers(dest="verb", required=True)
    sub(renorm_verbs, "detect", _cmd_renorm_detect)

    lam = groups.add_parser("lambda")
    lam_verbs = lam.add_subparsers(dest="verb", required=True)
    sub(lam_verbs, "sample", _cmd_lambda_sample, **{
        "--den-max": {"type": int, "default": 10 ** 6},
        "--seed": {"type": int, "default": 0},
    })

    pmap = groups.add_parser("pmap")
    pmap_verbs = pmap.add_subparsers(dest="verb", required=True)
    sub(pmap_verbs, "eval", _cmd_pmap_eval, **{"--angle": angle_kw})
    sub(pmap_verbs, "preimage", _cmd_pmap_preimage, **{"--angle": angle_kw})

    verify = groups.add_parser("verify")
    verify_verbs = verify.add_subparsers(dest="verb", required=True)
    sub(verify_verbs, "all", _cmd_verify_all, **{
        "--seed": {"type": int, "default": 0},
        "--depth": {"type": int, "default": 24},
        "--den-max": {"type": int, "default": 10 ** 6},
    })

    plot = groups.add_parser("plot")
    plot_verbs = plot.add_subparsers(dest="verb", required=True)
    sub(plot_verbs, "rays", _cmd_plot_rays, **{
        "--rays": {"type": int, "default": 64},
        "--seed": {"type": int, "default": 0},
        "--b-start": {"type": float, "default": 2.0},
        "--b-end": {"type": float, "default": 1e-6},
    })

    return parser


def run(argv: Sequence[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.handler(args)
    except TheoremViolation as exc:
        print(f"TheoremViolation: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except (DomainError, PrecisionError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main() -> None:
    sys.exit(run(sys.argv[1:]))
