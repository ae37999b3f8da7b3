"""SVG overlays of a registration result.

Green lines are matched edges (main object and walls), orange is the shared
main-object surface, red is registered ground whose labels disagree, grey is
the registered region. Output is plain text built in a fixed order, so equal
inputs give byte-identical documents.
"""

from __future__ import annotations

from dataclasses import dataclass

from .env import Environment, SemanticLabel, label_region
from .geom import (
    Region,
    Segment,
    boundary_segments,
    matched_intervals,
    region_difference,
    region_intersection,
    region_union,
    transform_region,
)
from .metrics import EDGE_TOL, Placement, physical_map, main_edges, wall_edges
from .optimize import RegistrationResult


@dataclass(frozen=True)
class RenderStyle:
    matched: str = "#2ca02c"
    main_surface: str = "#ff9f1c"
    mismatch: str = "#d62728"
    outline: str = "#000000"
    registered: str = "#9e9e9e"
    outline_width: float = 2.0
    matched_width: float = 4.0
    scale: float = 60.0  # px per metre
    margin: float = 30.0

    def __post_init__(self) -> None:
        if not self.scale > 0:
            raise ValueError("scale must be positive")


def _fmt(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


class _Canvas:
    def __init__(self, bounds, style: RenderStyle, legend_rows: int):
        self.x0, self.y0, self.x1, self.y1 = bounds
        self.s = style.scale
        self.m = style.margin
        self.width = 2 * self.m + (self.x1 - self.x0) * self.s
        self.legend_h = 22 * legend_rows + 10
        self.height = 2 * self.m + (self.y1 - self.y0) * self.s + self.legend_h
        self.parts: list[str] = []

    def X(self, x: float) -> float:
        return self.m + (x - self.x0) * self.s

    def Y(self, y: float) -> float:
        return self.m + (self.y1 - y) * self.s

    def rects(self, region: Region, cls: str, fill: str, opacity: float) -> None:
        for r in region.rects:
            self.parts.append(
                f'<rect class="{cls}" x="{_fmt(self.X(r.x_min))}" y="{_fmt(self.Y(r.y_max))}" '
                f'width="{_fmt(r.width * self.s)}" height="{_fmt(r.height * self.s)}" '
                f'fill="{fill}" fill-opacity="{_fmt(opacity)}" stroke="none"/>'
            )

    def segments(self, segs, cls: str, color: str, width: float, dash: str | None = None) -> None:
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        for s in segs:
            (ax, ay), (bx, by) = s.endpoints()
            self.parts.append(
                f'<line class="{cls}" x1="{_fmt(self.X(ax))}" y1="{_fmt(self.Y(ay))}" '
                f'x2="{_fmt(self.X(bx))}" y2="{_fmt(self.Y(by))}" stroke="{color}" '
                f'stroke-width="{_fmt(width)}"{extra}/>'
            )


def render_registration(
    V: Environment,
    P: Environment,
    result: RegistrationResult,
    style: RenderStyle = RenderStyle(),
    tol: float = EDGE_TOL,
) -> str:
    G, phi = result.best_gains, Placement.of(result.best_phi)
    m = physical_map(P, G)
    v_foot = V.footprint.translated(phi.x, phi.y)
    p_foot = transform_region(P.footprint, m)
    registered = region_intersection(v_foot, p_foot)

    agreed = Region()
    for label in SemanticLabel:
        lv = label_region(V, label).translated(phi.x, phi.y)
        lp = transform_region(label_region(P, label), m)
        agreed = region_union(agreed, region_intersection(lv, lp))
    mismatch = region_difference(registered, agreed)
    main_v = Region.of(V.main_object.rect.translated(phi.x, phi.y))
    main_p = transform_region(Region.of(P.main_object.rect), m)
    main_shared = region_intersection(main_v, main_p)

    matched = matched_segments(V, P, result, tol)

    both = region_union(v_foot, p_foot).bounds()
    legend = [
        ("matched edge", style.matched),
        ("registered main surface", style.main_surface),
        ("label mismatch", style.mismatch),
        ("registered region", style.registered),
    ]
    c = _Canvas(both, style, len(legend))

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(c.width)}" height="{_fmt(c.height)}" '
        f'viewBox="0 0 {_fmt(c.width)} {_fmt(c.height)}">',
        f"<!-- world y-up to document y-down: X = {_fmt(c.m)} + (x - {_fmt(c.x0)}) * {_fmt(c.s)}, "
        f"Y = {_fmt(c.m)} + ({_fmt(c.y1)} - y) * {_fmt(c.s)}; scale {_fmt(c.s)} px/m -->",
        f'<metadata data-scale="{_fmt(c.s)}" data-method="{result.method.value}" '
        f'data-objective="{result.objective:.6f}"/>',
    ]
    c.rects(registered, "registered", style.registered, 0.3)
    c.rects(mismatch, "mismatch", style.mismatch, 0.6)
    c.rects(main_shared, "main-surface", style.main_surface, 0.8)
    c.segments(boundary_segments(p_foot), "physical-outline", style.outline, style.outline_width)
    c.segments(boundary_segments(v_foot), "virtual-outline", style.outline, style.outline_width, "6 4")
    for o in V.objects:
        col = style.main_surface if o.label is SemanticLabel.MAIN_OBJECT else style.mismatch
        c.segments(boundary_segments(Region.of(o.rect.translated(phi.x, phi.y))), "virtual-object", col, 1.0, "4 3")
    for o in P.objects:
        col = style.main_surface if o.label is SemanticLabel.MAIN_OBJECT else style.mismatch
        c.segments(boundary_segments(transform_region(Region.of(o.rect), m)), "physical-object", col, 1.0)
    c.segments(matched, "matched", style.matched, style.matched_width)

    y = c.height - c.legend_h + 8
    for text, color in legend:
        c.parts.append(f'<rect class="legend" x="{_fmt(c.m)}" y="{_fmt(y)}" width="14" height="14" fill="{color}"/>')
        c.parts.append(
            f'<text class="legend" x="{_fmt(c.m + 20)}" y="{_fmt(y + 12)}" font-family="sans-serif" '
            f'font-size="13">{text}</text>'
        )
        y += 22
    out.extend(c.parts)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def matched_segments(V, P, result: RegistrationResult, tol: float = EDGE_TOL) -> list[Segment]:
    """Matched intervals drawn in green, in world coordinates."""
    vm, pm = main_edges(V, P, result.best_gains, result.best_phi)
    vw, pw = wall_edges(V, P, result.best_gains, result.best_phi)
    return matched_intervals(vm, pm, tol) + matched_intervals(vw, pw, tol)

