"""Static SVG figures of a configuration.

World coordinates are mapped to pixels with the y axis flipped, so figures
read in mathematical orientation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .constructions import (
    N,
    PentagramConfiguration,
    build_configuration,
    distinguished_points,
    k_star_and_e_points,
    kl_lines,
)
from .errors import GeometryError
from .kernel import Circle, Point, concurrent_lines, concyclic_many

LAYERS = ("A", "B", "C", "K", "L", "D", "E", "O", "J", "X", "circles", "klines")
POINT_SETS = ("A", "B", "C", "K", "L", "D", "E")
WIDTH = 800
MARGIN = 0.05

COLORS = {
    "A": "#1f3b73", "B": "#b03a2e", "C": "#1e8449", "K": "#7d3c98", "L": "#ca6f1e",
    "D": "#5d6d7e", "E": "#117a65", "O": "#000000", "J": "#000000", "X": "#c0392b",
}


@dataclass
class SvgScene:
    points: list[tuple[str, str, int | None, tuple[float, float]]] = field(default_factory=list)
    segments: list[tuple[tuple[float, float], tuple[float, float], str, str]] = field(default_factory=list)
    circles: list[tuple[tuple[float, float], float, str, str]] = field(default_factory=list)
    highlight: set[str] = field(default_factory=set)
    problems: list[str] = field(default_factory=list)

    def add_points(self, name: str, pts: Sequence[Point]) -> None:
        indexed = len(pts) > 1
        for i, p in enumerate(pts):
            self.points.append((name, COLORS.get(name, "#000"), i + 1 if indexed else None, _xy(p)))

    def bounds(self) -> tuple[float, float, float, float]:
        xs: list[float] = []
        ys: list[float] = []
        for *_, (x, y) in self.points:
            xs.append(x)
            ys.append(y)
        for (cx, cy), r, *_ in self.circles:
            xs += [cx - r, cx + r]
            ys += [cy - r, cy + r]
        for a, b, *_ in self.segments:
            xs += [a[0], b[0]]
            ys += [a[1], b[1]]
        xmin, xmax, ymin, ymax = min(xs), max(xs), min(ys), max(ys)
        span = max(xmax - xmin, ymax - ymin, 1e-9)
        pad = MARGIN * span
        return xmin - pad, xmax + pad, ymin - pad, ymax + pad


def _xy(p: Point) -> tuple[float, float]:
    return float(p.x), float(p.y)


def _line_segment(pts: Sequence[Point]) -> tuple[tuple[float, float], tuple[float, float]]:
    """Segment spanning all (collinear) points, ordered along their direction."""
    xy = [_xy(p) for p in pts]
    (x0, y0), (x1, y1) = xy[0], xy[1]
    dx, dy = x1 - x0, y1 - y0
    ts = [(x - x0) * dx + (y - y0) * dy for x, y in xy]
    lo = xy[ts.index(min(ts))]
    hi = xy[ts.index(max(ts))]
    return lo, hi


def _circle_entry(c: Circle, color: str, dash: str = "") -> tuple[tuple[float, float], float, str, str]:
    return _xy(c.center), math.sqrt(float(c.r2)), color, dash


def build_scene(A: Sequence[Point], show: Sequence[str] = ()) -> SvgScene:
    """Compute the requested layers; layers that hit a degeneracy are skipped and noted."""
    show = list(show) or ["A"]
    unknown = [s for s in show if s not in LAYERS]
    if unknown:
        raise ValueError(f"unknown layers: {', '.join(unknown)}")
    scene = SvgScene(highlight=set(show))
    scene.segments += [(_xy(A[i]), _xy(A[(i + 1) % N]), "#1f3b73", "") for i in range(N)]
    if "A" in show:
        scene.add_points("A", A)
    try:
        cfg = build_configuration(A)
    except GeometryError as err:
        if any(s != "A" for s in show):
            scene.problems.append(f"construction: {err}")
        return scene

    if "B" in show:
        # line A_i A_{i+1} runs through B_{i+1} and B_{i+3}
        for i in range(N):
            a, b = _line_segment([cfg.B[(i + 1) % N], cfg.B[(i + 3) % N], cfg.A[i], cfg.A[(i + 1) % N]])
            scene.segments.append((a, b, "#b03a2e", "4 3"))
    if "circles" in show:
        for c in cfg.side_circles:
            scene.circles.append(_circle_entry(c, "#7d3c98"))
        try:
            c_circle = concyclic_many(cfg.C)
            if c_circle.holds:
                scene.circles.append(_circle_entry(c_circle.witness, "#1e8449", "6 4"))
        except GeometryError as err:
            scene.problems.append(f"circle(C): {err}")
    chain = None
    if "D" in show or "E" in show:
        try:
            chain = k_star_and_e_points(cfg.K)
        except GeometryError as err:
            scene.problems.append(f"D/E: {err}")
    sets = {"B": cfg.B, "C": cfg.C, "K": cfg.K, "L": cfg.L}
    if chain is not None:
        sets["D"], sets["E"] = chain
    for name in POINT_SETS[1:]:
        if name in show and name in sets:
            scene.add_points(name, sets[name])
    if "klines" in show or "X" in show:
        try:
            lines_check = concurrent_lines(kl_lines(cfg), anchors=cfg.K + cfg.L)
            x = lines_check.witness
            if "klines" in show:
                for i in range(N):
                    a, b = _line_segment([cfg.K[i], cfg.L[i], x])
                    scene.segments.append((a, b, "#ca6f1e", ""))
            if "X" in show:
                scene.add_points("X", [x])
        except GeometryError as err:
            scene.problems.append(f"lines K_iL_i: {err}")
    if "O" in show or "J" in show:
        oj = _anchor_points(cfg)
        if oj is None:
            scene.problems.append("O/J: no concyclic anchor set (A, B or K)")
        else:
            for name, p in zip(("O", "J"), oj):
                if name in show:
                    scene.add_points(name, [p])
    return scene


def _anchor_points(cfg: PentagramConfiguration) -> tuple[Point, Point] | None:
    for anchor in ("B", "A", "K"):
        try:
            O, J, _ = distinguished_points(cfg, anchor)
            return O, J
        except GeometryError:
            continue
    return None


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def render_svg(scene: SvgScene) -> str:
    xmin, xmax, ymin, ymax = scene.bounds()
    scale = WIDTH / (xmax - xmin)
    height = (ymax - ymin) * scale

    def px(x: float, y: float) -> tuple[str, str]:
        return _fmt((x - xmin) * scale), _fmt((ymax - y) * scale)

    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" '
        f'height="{_fmt(height)}" viewBox="0 0 {WIDTH} {_fmt(height)}">',
        '<rect width="100%" height="100%" fill="white"/>',
        '<g id="circles" fill="none" stroke-width="1">',
    ]
    for (cx, cy), r, color, dash in scene.circles:
        x, y = px(cx, cy)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<circle cx="{x}" cy="{y}" r="{_fmt(r * scale)}" stroke="{color}"{dash_attr}/>')
    out.append("</g>")
    out.append('<g id="lines" stroke-width="1.2">')
    for a, b, color, dash in scene.segments:
        (x1, y1), (x2, y2) = px(*a), px(*b)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{color}"{dash_attr}/>')
    out.append("</g>")
    out.append('<g id="points" font-family="serif" font-size="14">')
    for name, color, index, (wx, wy) in scene.points:
        x, y = px(wx, wy)
        label = name if index is None else (
            f'{name}<tspan font-size="10" baseline-shift="sub">{index}</tspan>'
        )
        out.append(f'<circle cx="{x}" cy="{y}" r="3" fill="{color}"/>')
        out.append(
            f'<text x="{_fmt(float(x) + 5)}" y="{_fmt(float(y) - 5)}" fill="{color}">{label}</text>'
        )
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
