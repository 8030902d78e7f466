"""Minimal SVG output and the named figure sets.

Shapes are written in world coordinates inside one group whose transform
flips the y axis, so polyline points can be read back directly.
"""

from __future__ import annotations

import math
from html import escape

import numpy as np

from .balls import (
    j_ball_inscribed,
    largest_inscribed_ball,
    line_construction_ball,
    q_ball_euclidean,
    rho_ball_euclidean,
    sample_metric_sphere_2d,
)
from .geometry import HalfSpace, PuncturedSpace, UnitBall, rectangle
from .metrics import MetricKind, metric_function
from .radii import radii_j_in_rho, radii_j_q, radii_q_in_rho, radii_rho_q, q_threshold


def fmt(v) -> str:
    return f"{float(v):.15g}"


_COLORS = ["#1f4e9c", "#b03a2e", "#1e8449", "#7d3c98", "#b9770e", "#555555"]


class Svg:
    def __init__(self, box, size: int = 480, header: str = ""):
        self.xmin, self.xmax, self.ymin, self.ymax = map(float, box)
        self.size = size
        self.header = header
        self.shapes: list[str] = []
        self.captions: list[str] = []
        w, h = self.xmax - self.xmin, self.ymax - self.ymin
        self.scale = size / max(w, h)
        self.width = w * self.scale
        self.height = h * self.scale

    def _stroke(self, color, width):
        return f'fill="none" stroke="{color}" stroke-width="{fmt(width / self.scale)}"'

    def polyline(self, points, color=_COLORS[0], width=1.5, closed=False, label=""):
        P = np.asarray(points, dtype=float)
        if closed and len(P):
            P = np.vstack([P, P[:1]])
        pts = " ".join(f"{fmt(a)},{fmt(b)}" for a, b in P)
        lab = f' data-label="{escape(label)}"' if label else ""
        self.shapes.append(f'<polyline{lab} points="{pts}" {self._stroke(color, width)}/>')

    def circle(self, center, radius, color=_COLORS[5], width=1.0, dashed=False, label=""):
        dash = f' stroke-dasharray="{fmt(4 / self.scale)}"' if dashed else ""
        lab = f' data-label="{escape(label)}"' if label else ""
        self.shapes.append(
            f'<circle{lab} cx="{fmt(center[0])}" cy="{fmt(center[1])}" r="{fmt(radius)}" '
            f"{self._stroke(color, width)}{dash}/>"
        )

    def point(self, p, color="#000000", radius_px=2.5):
        self.shapes.append(
            f'<circle cx="{fmt(p[0])}" cy="{fmt(p[1])}" r="{fmt(radius_px / self.scale)}" fill="{color}"/>'
        )

    def line(self, a, b, color=_COLORS[5], width=1.0):
        self.shapes.append(
            f'<line x1="{fmt(a[0])}" y1="{fmt(a[1])}" x2="{fmt(b[0])}" y2="{fmt(b[1])}" '
            f"{self._stroke(color, width)}/>"
        )

    def caption(self, text: str):
        self.captions.append(text)

    def to_string(self) -> str:
        cap_h = 18 * len(self.captions)
        W, H = self.width, self.height + cap_h
        s = self.scale
        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{fmt(W)}" height="{fmt(H)}" '
            f'viewBox="0 0 {fmt(W)} {fmt(H)}">',
        ]
        if self.header:
            out.append(f"<desc>{escape(self.header)}</desc>")
        out.append(f'<g transform="matrix({fmt(s)} 0 0 {fmt(-s)} {fmt(-self.xmin * s)} {fmt(self.ymax * s)})">')
        out.extend(self.shapes)
        out.append("</g>")
        for i, text in enumerate(self.captions):
            out.append(
                f'<text x="6" y="{fmt(self.height + 14 + 18 * i)}" font-family="sans-serif" '
                f'font-size="12">{escape(text)}</text>'
            )
        out.append("</svg>")
        return "\n".join(out) + "\n"


def read_polylines(svg_text: str) -> list[np.ndarray]:
    """World-coordinate points of every polyline in an SVG written by :class:`Svg`."""
    import re

    out = []
    for m in re.finditer(r'<polyline[^>]*points="([^"]*)"', svg_text):
        pts = [tuple(map(float, p.split(","))) for p in m.group(1).split()]
        out.append(np.array(pts))
    return out


# ---------------------------------------------------------------------------
# figure sets


def _sphere(G, kind, x, r, N):
    s = sample_metric_sphere_2d(G, kind, x, r, N)
    return s.points


def figure_jcircles(N: int = 720, header: str = "") -> dict[str, str]:
    """j-circles in the punctured plane, the upper half-plane and a rectangle."""
    panels = {
        "jcircles_punctured.svg": (PuncturedSpace(((0.0, 0.0),)), (1.0, 0.0), (0.3, math.log(2.0), 1.0), (-2.2, 4.2, -3.2, 3.2)),
        "jcircles_halfplane.svg": (HalfSpace(2), (0.0, 1.0), (0.5, 1.0, 1.5), (-4.0, 4.0, -0.5, 5.5)),
        "jcircles_rectangle.svg": (rectangle(2.0, 1.0), (0.6, 0.4), (0.3, 0.6, 1.0), (-0.2, 2.2, -0.2, 1.2)),
    }
    out = {}
    for name, (G, x, radii, box) in panels.items():
        svg = Svg(box, header=header)
        if isinstance(G, PuncturedSpace):
            for q in G.points:
                svg.point(q, "#b03a2e")
        elif isinstance(G, HalfSpace):
            svg.line((box[0], 0.0), (box[1], 0.0))
        else:
            svg.polyline(G.points, _COLORS[5], 1.0, closed=True, label="domain")
        for i, r in enumerate(radii):
            svg.polyline(_sphere(G, "j", x, r, N), _COLORS[i], closed=True, label=f"S_j r={fmt(r)}")
        svg.point(x)
        svg.caption(f"j-circles in the {G.name} about x = ({x[0]}, {x[1]}), r = " + ", ".join(f"{r:.4g}" for r in radii))
        out[name] = svg.to_string()
    return out


def two_puncture_data(N: int = 720):
    G = PuncturedSpace(((-1.0, 0.0), (1.0, 0.0)))
    x = np.array([0.0, 1.0])
    r = math.log(2.0)
    boundary = _sphere(G, "j", x, r, N)
    naive = line_construction_ball(G, x, r)
    f = metric_function(MetricKind.DISTANCE_RATIO, G, x)
    g = np.linspace(-1.5, 1.5, 121)
    centers = np.array([(a, b) for a in g for b in np.linspace(0.0, 2.6, 105)])
    best = largest_inscribed_ball(boundary, lambda c: f(c) < r, centers)
    return G, x, r, boundary, naive, best


def figure_two_puncture(N: int = 720, header: str = "") -> dict[str, str]:
    """The j-circle of the twice punctured plane with two segments through the origin."""
    G, x, r, boundary, naive, best = two_puncture_data(N)
    a = (1.0 + math.sqrt(3.0)) / 2.0
    svg = Svg((-2.0, 2.0, -0.6, 2.8), header=header)
    for q in G.points:
        svg.point(q, "#b03a2e")
    svg.polyline(boundary, _COLORS[0], closed=True, label="S_j")
    svg.circle(naive.center, naive.radius, _COLORS[1], dashed=True, label="line construction")
    svg.circle(best.center, best.radius, _COLORS[2], label="inscribed (grid search)")
    svg.point(x)
    svg.caption(f"j-circle r = log 2 about e2 in R^2 minus {{-e1, e1}}; segment ends a(+-1, 1), a = {a:.6f}")
    return {"two_puncture.svg": svg.to_string()}


def _inclusion_figure(name, x, r, bound, metric_small, metric_r, header, N):
    G = UnitBall(2)
    svg = Svg((-1.05, 1.05, -1.05, 1.05), header=header)
    svg.circle((0.0, 0.0), 1.0, _COLORS[5], label="unit circle")
    curves = [(metric_small, bound.m, _COLORS[0]), (metric_r, r, _COLORS[1]), (metric_small, bound.M, _COLORS[0])]
    for kind, rad, color in curves:
        if not math.isfinite(rad):
            continue
        if kind == "rho":
            b = rho_ball_euclidean(x, rad)
            svg.circle(b.center, b.radius, color, label=f"B_rho r={fmt(rad)}")
        elif kind == "q" and rad < 1.0 / math.sqrt(1.0 + x @ x) and rad < q_threshold(float(np.linalg.norm(x))):
            b = q_ball_euclidean(x, rad)
            svg.circle(b.center, b.radius, color, label=f"B_q r={fmt(rad)}")
        else:
            svg.polyline(_sphere(G, kind, x, rad, N), color, closed=True, label=f"S_{kind} r={fmt(rad)}")
    svg.point(x)
    svg.caption(
        f"B_{metric_small}(x, {bound.m:.4g}) in B_{metric_r}(x, {r:.4g}) in B_{metric_small}(x, {bound.M:.4g}), x = ({x[0]}, 0)"
    )
    return {f"{name}.svg": svg.to_string()}


def figure_jrho(N: int = 720, header: str = "") -> dict[str, str]:
    x = np.array([0.5, 0.0])
    return _inclusion_figure("jrho", x, 1.0, radii_j_in_rho(0.5, 1.0), "j", "rho", header, N)


def figure_jq(N: int = 720, header: str = "") -> dict[str, str]:
    x = np.array([0.3, 0.0])
    r = 0.6 * q_threshold(0.3)
    return _inclusion_figure("jq", x, r, radii_j_q(0.3, r), "j", "q", header, N)


def figure_rhoq(N: int = 720, header: str = "") -> dict[str, str]:
    x = np.array([0.4, 0.0])
    r = 0.6 * q_threshold(0.4)
    out = _inclusion_figure("rhoq", x, r, radii_rho_q(0.4, r), "rho", "q", header, N)
    out.update(_inclusion_figure("qrho", x, 0.5, radii_q_in_rho(0.4, 0.5), "q", "rho", header, N))
    return out


def figure_inscribed(N: int = 720, header: str = "") -> dict[str, str]:
    """The unit-disk j-circle with its inscribed ball on the diameter chord."""
    x = np.array([0.5, 0.0])
    r = 0.5
    svg = Svg((-1.05, 1.05, -1.05, 1.05), header=header)
    svg.circle((0.0, 0.0), 1.0, _COLORS[5])
    svg.polyline(_sphere(UnitBall(2), "j", x, r, N), _COLORS[0], closed=True, label="S_j")
    b = j_ball_inscribed(x, r)
    svg.circle(b.center, b.radius, _COLORS[2], label="inscribed")
    svg.point(x)
    svg.caption("j-circle in the unit disk with the ball on its diameter chord")
    return {"inscribed.svg": svg.to_string()}


FIGURE_SETS = {
    "jcircles": figure_jcircles,
    "two-puncture": figure_two_puncture,
    "jrho": figure_jrho,
    "jq": figure_jq,
    "rhoq": figure_rhoq,
    "inscribed": figure_inscribed,
}
