"""Standalone SVG figures: potential heat layer, level curves, rays.

Everything is drawn from a RunConfig alone, with fixed-precision
coordinate formatting, so equal configs produce byte-identical
documents.  No external imaging libraries are involved.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .angles import Angle
from .errors import DomainError, PrecisionError
from .pmap import FundamentalArcs, build_arcs, membership
from .poly import Polynomial, green_potential
from .rays import STATUS_CRASHED, STATUS_LANDED, equipotential_component, trace_ray
from .renorm import build_renormalization, main_crash_pair, nest_probe
from .verify import RunConfig, load_polynomial

_HEAT_CELLS = 64
_CANVAS = 800.0

_COLOR_MEMBER = "#e2583e"
_COLOR_EXCLUDED = "#4f7fbf"
_COLOR_LEVEL = "#e8b23a"
_COLOR_CRASH = "#c21a4f"
_COLOR_LANDING = "#1f9d6a"


def _fmt(x: float) -> str:
    # fixed decimals keep the byte stream stable across runs
    return f"{x:.4f}"


def _heat_color(u: float, u_max: float) -> str:
    if u <= 0.0:
        return "#070b14"
    t = min(1.0, math.log1p(u / u_max * 20.0) / math.log(21.0))
    r = round(16 + t * (214 - 16))
    g = round(28 + t * (226 - 28))
    b = round(58 + t * (243 - 58))
    return f"#{r:02x}{g:02x}{b:02x}"


def _window(P: Polynomial, level: float) -> tuple[float, float, float]:
    """(cx, cy, half-width) framing the level curve with a margin."""
    seed = complex(max(3.0, 1.0 + P.coeff_abs_sum()), 0.0)
    loop = equipotential_component(P, level, seed, n_points=512)
    xs = [z.real for z in loop]
    ys = [z.imag for z in loop]
    cx = (max(xs) + min(xs)) / 2
    cy = (max(ys) + min(ys)) / 2
    half = max(max(xs) - min(xs), max(ys) - min(ys)) / 2
    return cx, cy, half * 1.25


class _Frame:
    def __init__(self, cx: float, cy: float, half: float) -> None:
        self.cx, self.cy, self.half = cx, cy, half
        self.scale = _CANVAS / (2 * half)

    def px(self, z: complex) -> tuple[float, float]:
        # the imaginary axis points up on the figure
        return ((z.real - self.cx) * self.scale + _CANVAS / 2,
                (self.cy - z.imag) * self.scale + _CANVAS / 2)

    def pt(self, z: complex) -> str:
        x, y = self.px(z)
        return f"{_fmt(x)},{_fmt(y)}"


def _heat_layer(P: Polynomial, fr: _Frame) -> list[str]:
    n = _HEAT_CELLS
    step = 2 * fr.half / n
    u_grid: list[list[float]] = []
    u_max = 1e-9
    for iy in range(n):
        row = []
        for ix in range(n):
            z = complex(fr.cx - fr.half + (ix + 0.5) * step,
                        fr.cy + fr.half - (iy + 0.5) * step)
            u = green_potential(P, z).value
            row.append(u)
            u_max = max(u_max, u)
        u_grid.append(row)
    cell = _CANVAS / n
    out = ['<g shape-rendering="crispEdges">']
    for iy in range(n):
        for ix in range(n):
            color = _heat_color(u_grid[iy][ix], u_max)
            out.append(f'<rect x="{_fmt(ix * cell)}" y="{_fmt(iy * cell)}" '
                       f'width="{_fmt(cell + 0.5)}" height="{_fmt(cell + 0.5)}" '
                       f'fill="{color}"/>')
    out.append("</g>")
    return out


def _level_paths(P: Polynomial, fr: _Frame, levels: list[float]) -> list[str]:
    out = []
    seed = complex(max(3.0, 1.0 + P.coeff_abs_sum()), 0.0)
    for b in levels:
        try:
            loop = equipotential_component(P, b, seed, n_points=1024)
        except (DomainError, PrecisionError):
            continue
        pts = " ".join(fr.pt(z) for z in loop[::2])
        out.append(f'<polygon points="{pts}" fill="none" '
                   f'stroke="{_COLOR_LEVEL}" stroke-width="1.1" opacity="0.8"/>')
    return out


def _ray_elements(P: Polynomial, fa: FundamentalArcs, fr: _Frame,
                  tau: Angle, b_start: float, b_end: float) -> list[str]:
    try:
        tr = trace_ray(P, tau, b_start=b_start, b_end=b_end)
    except (DomainError, PrecisionError):
        return []
    color = _COLOR_MEMBER if membership(fa, tau).is_member else _COLOR_EXCLUDED
    pts = " ".join(fr.pt(z) for _, z in tr.samples)
    out = [f'<polyline points="{pts}" fill="none" stroke="{color}" '
           f'stroke-width="1.2"><title>{tau}</title></polyline>']
    r_mark = _fmt(_CANVAS / 220)
    if tr.crash is not None:
        x, y = fr.px(tr.crash[1])
        out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{r_mark}" '
                   f'fill="none" stroke="{_COLOR_CRASH}" stroke-width="1.6"/>')
    if tr.status == STATUS_LANDED and tr.landing is not None:
        x, y = fr.px(tr.landing[0])
        out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{r_mark}" '
                   f'fill="{_COLOR_LANDING}"/>')
    return out


def render_document(config: RunConfig, P: Polynomial | None = None) -> str:
    """The full SVG document for a config; config.rays = 0 draws background only."""
    if P is None:
        P = load_polynomial(config.poly)
    ren = build_renormalization(P)
    fa = build_arcs(ren, main_crash_pair(ren), nest_probe(P, ren))
    frame_level = max(1.0, 1.3 * max(c.potential for c in ren.escaping))
    fr = _Frame(*_window(P, frame_level))

    body: list[str] = []
    body += _heat_layer(P, fr)
    body += _level_paths(P, fr, [ren.b0 * math.sqrt(ren.D), ren.b0, ren.b0 / ren.D])
    n_rays = max(0, config.rays)
    b_end = max(config.b_end, 1e-8)
    for k in range(n_rays):
        body += _ray_elements(P, fa, fr, Angle(Fraction(k, n_rays)),
                              config.b_start, b_end)

    size = int(_CANVAS)
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
            f'height="{size}" viewBox="0 0 {size} {size}">'
            f'<title>external rays, degree {P.degree}</title>')
    return head + "\n" + "\n".join(body) + "\n</svg>\n"
