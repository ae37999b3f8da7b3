"""Registration metrics and the weighted objective.

Evaluation frame: the physical scene is pushed through the gain map
(``P'``) and the virtual scene is translated by the placement offset
(``V' = V + phi``). All ratios are taken relative to virtual quantities.

Two routes compute the same numbers. The ``psi_*`` functions compose the
region algebra in :mod:`retarget.geom` and are meant to be read; ``Scorer``
precomputes both scenes as arrays and is what the optimizer calls.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .env import Environment, SemanticLabel, label_region, wall_segments
from .geom import (
    Orientation,
    Region,
    Segment,
    matched_edge_length,
    rect_segments,
    region_area,
    region_difference,
    region_intersection,
    region_union,
    total_length,
    transform_rect,
    transform_region,
    transform_segments,
    union_length,
)
from .rescale import GainSet, GridPartition, RescaleMap, axis_map

EDGE_TOL = 0.01


@dataclass(frozen=True)
class Placement:
    x: float = 0.0
    y: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError("placement offset must be finite")

    @classmethod
    def of(cls, phi) -> Placement:
        if isinstance(phi, Placement):
            return phi
        return cls(float(phi[0]), float(phi[1]))

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


@dataclass(frozen=True)
class Weights:
    w_hor: tuple[float, ...] = (100.0,)
    w_ver: tuple[float, ...] = (30.0,)
    w_size: float = 5.0
    w_sem: float = 10.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "w_hor", tuple(float(w) for w in self.w_hor))
        object.__setattr__(self, "w_ver", tuple(float(w) for w in self.w_ver))
        allw = [*self.w_hor, *self.w_ver, self.w_size, self.w_sem]
        if any(w < 0 or not math.isfinite(w) for w in allw):
            raise ValueError("weights must be finite and non-negative")
        if not any(w > 0 for w in allw):
            raise ValueError("at least one weight must be positive")

    @classmethod
    def parse(cls, text: str) -> Weights:
        """``"100,30,5,10"`` -> Weights(hor=100, ver=30, size=5, sem=10)."""
        vals = [float(t) for t in text.split(",")]
        if len(vals) != 4:
            raise ValueError("expected four comma-separated weights: hor,ver,size,sem")
        return cls((vals[0],), (vals[1],), vals[2], vals[3])

    @property
    def total(self) -> float:
        return sum(self.w_hor) + sum(self.w_ver) + self.w_size + self.w_sem


@dataclass(frozen=True)
class MetricReport:
    psi_hor: float
    psi_ver: float
    psi_sem: float
    psi_size: float
    registered_area: float
    registered_main_surface_ratio: float
    objective: float = field(default=0.0)

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


def physical_map(P: Environment, G: GainSet) -> RescaleMap:
    part = GridPartition.from_environment(P)
    return RescaleMap(part, G, (part.x_bounds[0], part.y_bounds[0]), P.footprint)


def _translate_segments(segs: Sequence[Segment], phi: Placement) -> list[Segment]:
    out = []
    for s in segs:
        if s.orientation is Orientation.HORIZONTAL:
            out.append(Segment(s.orientation, s.fixed + phi.y, s.lo + phi.x, s.hi + phi.x))
        else:
            out.append(Segment(s.orientation, s.fixed + phi.x, s.lo + phi.y, s.hi + phi.y))
    return out


def main_edges(V, P, G, phi) -> tuple[list[Segment], list[Segment]]:
    phi = Placement.of(phi)
    v = rect_segments(V.main_object.rect.translated(phi.x, phi.y))
    p = rect_segments(transform_rect(P.main_object.rect, physical_map(P, G)))
    return v, p


def wall_edges(V, P, G, phi, vertical_objects=((), ())) -> tuple[list[Segment], list[Segment]]:
    phi = Placement.of(phi)
    v = _translate_segments(wall_segments(V, vertical_objects[0]), phi)
    p = transform_segments(wall_segments(P, vertical_objects[1]), physical_map(P, G))
    return v, p


def psi_hor(V: Environment, P: Environment, G: GainSet, phi, tol: float = EDGE_TOL) -> float:
    v, p = main_edges(V, P, G, phi)
    return matched_edge_length(v, p, tol) / V.main_object.rect.perimeter


def psi_ver(V: Environment, P: Environment, G: GainSet, phi, tol: float = EDGE_TOL) -> float:
    v, p = wall_edges(V, P, G, phi)
    return matched_edge_length(v, p, tol) / total_length(v)


def registered_region(V: Environment, P: Environment, G: GainSet, phi) -> Region:
    phi = Placement.of(phi)
    return region_intersection(V.footprint.translated(phi.x, phi.y), transform_region(P.footprint, physical_map(P, G)))


def psi_size(V: Environment, P: Environment, G: GainSet, phi) -> tuple[float, float]:
    phi = Placement.of(phi)
    area = region_area(registered_region(V, P, G, phi))
    return min(area / region_area(V.footprint.translated(phi.x, phi.y)), 1.0), area


def psi_sem(V: Environment, P: Environment, G: GainSet, phi) -> float:
    phi = Placement.of(phi)
    registered = registered_region(V, P, G, phi)
    reg = region_area(registered)
    if reg <= 0:
        return 0.0
    m = physical_map(P, G)
    agreed = Region()
    for label in SemanticLabel:
        lv = label_region(V, label).translated(phi.x, phi.y)
        lp = transform_region(label_region(P, label), m)
        agreed = region_union(agreed, region_intersection(lv, lp))
    # measured through the disagreeing part so full agreement is exactly 1
    return max(1.0 - region_area(region_difference(registered, agreed)) / reg, 0.0)


def registered_main_surface_ratio(V: Environment, P: Environment, G: GainSet, phi) -> float:
    phi = Placement.of(phi)
    v = Region.of(V.main_object.rect.translated(phi.x, phi.y))
    p = Region.of(transform_rect(P.main_object.rect, physical_map(P, G)))
    return region_area(region_intersection(v, p)) / V.main_object.rect.area


def combine(weights: Weights, hor: Sequence[float], ver: Sequence[float], size: float, sem: float) -> float:
    if len(hor) != len(weights.w_hor) or len(ver) != len(weights.w_ver):
        raise ValueError(
            f"weights list {len(weights.w_hor)} horizontal / {len(weights.w_ver)} vertical targets, "
            f"scene provides {len(hor)} / {len(ver)}"
        )
    return (
        sum(w * h for w, h in zip(weights.w_hor, hor))
        + sum(w * v for w, v in zip(weights.w_ver, ver))
        + weights.w_size * size
        + weights.w_sem * sem
    )


def objective(
    V: Environment,
    P: Environment,
    G: GainSet,
    phi,
    weights: Weights = Weights(),
    tol: float = EDGE_TOL,
) -> tuple[float, MetricReport]:
    report = Scorer(V, P, weights, tol).evaluate(G, phi)
    return report.objective, report


# --- array fast path --------------------------------------------------------

_LABEL_CODE = {SemanticLabel.FLOOR: 1, SemanticLabel.MAIN_OBJECT: 2, SemanticLabel.OBSTACLE: 3}


def _layers(e: Environment) -> tuple[np.ndarray, np.ndarray]:
    """Rect array and label codes in paint order: floor, obstacles, main object."""
    rects = [r.as_tuple() for r in e.footprint.rects]
    labels = [1] * len(rects)
    for o in e.obstacles:
        rects.append(o.rect.as_tuple())
        labels.append(3)
    rects.append(e.main_object.rect.as_tuple())
    labels.append(2)
    return np.array(rects, dtype=float), np.array(labels, dtype=np.int8)


def _seg_array(segs: Sequence[Segment]) -> np.ndarray:
    """Columns: vertical flag, fixed, lo, hi."""
    return np.array(
        [(s.orientation is Orientation.VERTICAL, s.fixed, s.lo, s.hi) for s in segs], dtype=float
    ).reshape(-1, 4)


def _paint(rects: np.ndarray, labels: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    grid = np.zeros((len(xs) - 1, len(ys) - 1), dtype=np.int8)
    i0 = np.searchsorted(xs, rects[:, 0])
    i1 = np.searchsorted(xs, rects[:, 2])
    j0 = np.searchsorted(ys, rects[:, 1])
    j1 = np.searchsorted(ys, rects[:, 3])
    for a, b, c, d, lab in zip(i0, i1, j0, j1, labels):
        grid[a:b, c:d] = lab
    return grid


def matched_length_arrays(s: np.ndarray, t: np.ndarray, tol: float) -> float:
    """Array form of :func:`retarget.geom.matched_edge_length`."""
    if not len(s) or not len(t):
        return 0.0
    ok = (s[:, None, 0] == t[None, :, 0]) & (np.abs(s[:, None, 1] - t[None, :, 1]) < tol)
    lo = np.maximum(s[:, None, 2], t[None, :, 2])
    hi = np.minimum(s[:, None, 3], t[None, :, 3])
    ok &= hi > lo
    counts = ok.sum(axis=1)
    single = counts == 1
    total = float(((hi - lo) * ok)[single].sum())
    for i in np.flatnonzero(counts > 1):
        total += union_length(zip(lo[i][ok[i]], hi[i][ok[i]]))
    return total


class Scorer:
    """Precomputed evaluator for one (virtual, physical) pair."""

    def __init__(
        self,
        virtual: Environment,
        physical: Environment,
        weights: Weights = Weights(),
        tol: float = EDGE_TOL,
        vertical_objects: tuple[Sequence[str], Sequence[str]] = ((), ()),
    ):
        if tol <= 0:
            raise ValueError("edge tolerance must be positive")
        self.virtual, self.physical = virtual, physical
        self.weights, self.tol = weights, tol

        self.v_rects, self.v_labels = _layers(virtual)
        self.v_main = np.array(virtual.main_object.rect.as_tuple())
        self.v_main_segs = _seg_array(rect_segments(virtual.main_object.rect))
        self.v_walls = _seg_array(wall_segments(virtual, vertical_objects[0]))
        self.v_area = virtual.area
        self.v_main_area = virtual.main_object.rect.area
        self.v_main_perimeter = virtual.main_object.rect.perimeter
        self.v_wall_length = float((self.v_walls[:, 3] - self.v_walls[:, 2]).sum())

        self.p_rects, self.p_labels = _layers(physical)
        self.p_main_segs = _seg_array(rect_segments(physical.main_object.rect))
        self.p_walls = _seg_array(wall_segments(physical, vertical_objects[1]))
        part = GridPartition.from_environment(physical)
        self.partition = part
        self.anchor = (part.x_bounds[0], part.y_bounds[0])
        self._frames: dict[tuple[float, ...], tuple[np.ndarray, ...]] = {}
        self._flatten_physical()

    def map_x(self, x, gx):
        return axis_map(x, *self.partition.x_bounds, tuple(gx), self.anchor[0])

    def map_y(self, y, gy):
        return axis_map(y, *self.partition.y_bounds, tuple(gy), self.anchor[1])

    def _flatten_physical(self) -> None:
        """All physical coordinates in one vector with an is-x mask, so a frame
        costs two axis-map calls."""
        parts, is_x = [], []
        parts.append(self.p_rects.ravel())
        is_x.append(np.tile([True, False, True, False], len(self.p_rects)))
        for segs in (self.p_main_segs, self.p_walls):
            vert = segs[:, 0] == 1.0
            parts.append(segs[:, 1:].ravel())
            is_x.append(np.column_stack([vert, ~vert, ~vert]).ravel())
        self._p_flat = np.concatenate(parts)
        self._p_is_x = np.concatenate(is_x)
        self._p_split = (self.p_rects.size, self.p_rects.size + 3 * len(self.p_main_segs))

    def physical_frame(self, gains: GainSet) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        key = (*gains.gx, *gains.gy)
        hit = self._frames.get(key)
        if hit is None:
            flat = np.empty_like(self._p_flat)
            flat[self._p_is_x] = self.map_x(self._p_flat[self._p_is_x], gains.gx)
            flat[~self._p_is_x] = self.map_y(self._p_flat[~self._p_is_x], gains.gy)
            a, b = self._p_split
            rects = flat[:a].reshape(-1, 4)
            main = np.column_stack([self.p_main_segs[:, 0], flat[a:b].reshape(-1, 3)])
            walls = np.column_stack([self.p_walls[:, 0], flat[b:].reshape(-1, 3)])
            hit = (rects, main, walls)
            if len(self._frames) > 4096:
                self._frames.clear()
            self._frames[key] = hit
        return hit

    def evaluate(self, gains: GainSet, phi) -> MetricReport:
        phi = Placement.of(phi)
        p_rects, p_main, p_walls = self.physical_frame(gains)
        shift = np.array([phi.x, phi.y, phi.x, phi.y])
        v_rects = self.v_rects + shift

        xs = np.unique(np.concatenate([v_rects[:, 0], v_rects[:, 2], p_rects[:, 0], p_rects[:, 2]]))
        ys = np.unique(np.concatenate([v_rects[:, 1], v_rects[:, 3], p_rects[:, 1], p_rects[:, 3]]))
        lv = _paint(v_rects, self.v_labels, xs, ys)
        lp = _paint(p_rects, self.p_labels, xs, ys)
        cells = np.outer(np.diff(xs), np.diff(ys))
        both = (lv > 0) & (lp > 0)
        reg = float(cells[both].sum())
        sem_num = float(cells[both & (lv == lp)].sum())

        # virtual area summed over the same cells, so full overlap gives exactly 1
        v_area = float(cells[lv > 0].sum())
        size = min(reg / v_area, 1.0)
        sem = min(sem_num / reg, 1.0) if reg > 0 else 0.0

        vm = v_rects[-1]
        pm = p_rects[-1]
        ow = min(vm[2], pm[2]) - max(vm[0], pm[0])
        oh = min(vm[3], pm[3]) - max(vm[1], pm[1])
        main_ratio = min(float(max(ow, 0.0) * max(oh, 0.0)) / self.v_main_area, 1.0)

        hor = min(matched_length_arrays(self._shift_segs(self.v_main_segs, phi), p_main, self.tol) / self.v_main_perimeter, 1.0)
        ver = min(matched_length_arrays(self._shift_segs(self.v_walls, phi), p_walls, self.tol) / self.v_wall_length, 1.0)

        obj = combine(self.weights, [hor], [ver], size, sem)
        return MetricReport(hor, ver, sem, size, reg, main_ratio, obj)

    @staticmethod
    def _shift_segs(segs: np.ndarray, phi: Placement) -> np.ndarray:
        vert = segs[:, 0] == 1.0
        out = segs.copy()
        fixed_shift = np.where(vert, phi.x, phi.y)
        span_shift = np.where(vert, phi.y, phi.x)
        out[:, 1] += fixed_shift
        out[:, 2] += span_shift
        out[:, 3] += span_shift
        return out

    # feature coordinates used by the optimizer's alignment moves
    def feature_coords(self, gains: GainSet | None = None):
        """Per axis: ({'main': coords, 'wall': coords} virtual, same for physical).

        Physical coordinates are in the rescaled frame when ``gains`` is given,
        otherwise in the raw physical frame.
        """
        p_main, p_walls = self.p_main_segs, self.p_walls
        if gains is not None:
            _, p_main, p_walls = self.physical_frame(gains)
        out = {}
        for axis, flag in (("x", 1.0), ("y", 0.0)):
            out[axis] = (
                {"main": _fixed(self.v_main_segs, flag), "wall": _fixed(self.v_walls, flag)},
                {"main": _fixed(p_main, flag), "wall": _fixed(p_walls, flag)},
            )
        return out


def _fixed(segs: np.ndarray, flag: float) -> np.ndarray:
    return np.unique(segs[segs[:, 0] == flag, 1])
