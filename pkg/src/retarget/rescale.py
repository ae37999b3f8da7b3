"""Grid-wise relative translation gains around the main object.

The main object's edges, extended across the room, cut each axis into three
bands (left/middle/right, bottom/middle/top). Each band carries its own gain,
so the nine grid cells receive the pairs ``(gx[i], gy[j])`` and the induced
rescaling is a separable, piecewise-linear map per axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .env import Environment
from .geom import GeometryError, Region

GAIN_BOUNDS = (0.86, 1.26)
RATIO_BOUNDS = (0.92, 1.23)
SMOOTHING_HALF_WIDTH = 0.25
DEFAULT_STEP = 0.01


@dataclass(frozen=True)
class GainSet:
    gx: tuple[float, float, float]
    gy: tuple[float, float, float]

    def __post_init__(self) -> None:
        gx = tuple(float(g) for g in self.gx)
        gy = tuple(float(g) for g in self.gy)
        if len(gx) != 3 or len(gy) != 3:
            raise ValueError("GainSet needs three gains per axis")
        if not all(math.isfinite(g) and g > 0 for g in gx + gy):
            raise ValueError(f"gains must be finite and positive, got {gx}, {gy}")
        object.__setattr__(self, "gx", gx)
        object.__setattr__(self, "gy", gy)

    @classmethod
    def identity(cls) -> GainSet:
        return cls((1.0, 1.0, 1.0), (1.0, 1.0, 1.0))

    @classmethod
    def uniform(cls, gx: float, gy: float) -> GainSet:
        return cls((gx, gx, gx), (gy, gy, gy))

    def as_list(self) -> list[float]:
        return [*self.gx, *self.gy]

    def is_identity(self) -> bool:
        return all(g == 1.0 for g in self.gx + self.gy)

    def max_deviation(self) -> float:
        return max(abs(g - 1.0) for g in self.gx + self.gy)


class ConstraintViolation(ValueError):
    def __init__(self, report: "ConstraintReport"):
        super().__init__("infeasible gains: " + ", ".join(report.failed()))
        self.report = report


@dataclass(frozen=True)
class ConstraintReport:
    """Signed violations; a constraint holds when its value is <= 0."""

    violations: dict[str, float] = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return all(v <= 0 for v in self.violations.values())

    def failed(self) -> list[str]:
        return [k for k, v in self.violations.items() if v > 0]

    @property
    def worst(self) -> float:
        return max(self.violations.values())


def check_constraints(
    g: GainSet,
    alpha: tuple[float, float] = RATIO_BOUNDS,
    bounds: tuple[float, float] = GAIN_BOUNDS,
) -> ConstraintReport:
    lo_a, hi_a = alpha
    if not lo_a <= 1.0 <= hi_a:
        raise ValueError(f"ratio bounds must bracket 1, got {alpha}")
    lo_g, hi_g = bounds
    v: dict[str, float] = {}
    for axis, gains in (("gx", g.gx), ("gy", g.gy)):
        for i, val in enumerate(gains):
            v[f"gain bound {axis}[{i}]"] = max(lo_g - val, val - hi_g)
    r_low = min(g.gx) / max(g.gy)
    r_high = max(g.gx) / min(g.gy)
    v["ratio min(gx)/max(gy) >= alpha_low"] = lo_a - r_low
    v["ratio min(gx)/max(gy) <= alpha_high"] = r_low - hi_a
    v["ratio max(gx)/min(gy) >= alpha_low"] = lo_a - r_high
    v["ratio max(gx)/min(gy) <= alpha_high"] = r_high - hi_a
    return ConstraintReport(v)


@dataclass(frozen=True)
class GridPartition:
    x_bounds: tuple[float, float]
    y_bounds: tuple[float, float]

    def __post_init__(self) -> None:
        if not (self.x_bounds[0] < self.x_bounds[1] and self.y_bounds[0] < self.y_bounds[1]):
            raise ValueError("partition bounds must be strictly ordered")

    @classmethod
    def from_environment(cls, e: Environment) -> GridPartition:
        r = e.main_object.rect
        return cls((r.x_min, r.x_max), (r.y_min, r.y_max))


def axis_map(v, b1: float, b2: float, g: tuple[float, float, float], anchor: float):
    """Continuous piecewise-linear map with slopes g on (-inf,b1], [b1,b2], [b2,inf)
    and ``anchor`` as fixed point.

    Written as the middle-band line plus hinge corrections so that equal band
    gains reproduce the single-gain map bit for bit.
    """
    v = np.asarray(v, dtype=float)
    gl, gm, gr = g
    if gl == gm == gr == 1.0:
        return v.copy()

    def f(t):
        return gm * (t - b1) + (gr - gm) * np.maximum(t - b2, 0.0) + (gl - gm) * np.minimum(t - b1, 0.0)

    if anchor == b1:
        return b1 + f(v)
    return anchor + (f(v) - f(np.asarray(anchor, dtype=float)))


def axis_unmap(w, b1: float, b2: float, g: tuple[float, float, float], anchor: float):
    w = np.asarray(w, dtype=float)
    gl, gm, gr = g
    if gl == gm == gr == 1.0:
        return w.copy()
    m1, m2 = axis_map(np.array([b1, b2]), b1, b2, g, anchor)
    return np.where(w < m1, b1 + (w - m1) / gl, np.where(w > m2, b2 + (w - m2) / gr, b1 + (w - m1) / gm))


@dataclass(frozen=True)
class RescaleMap:
    partition: GridPartition
    gains: GainSet
    anchor: tuple[float, float]
    footprint: Region | None = None

    def map_x(self, x):
        return axis_map(x, *self.partition.x_bounds, self.gains.gx, self.anchor[0])

    def map_y(self, y):
        return axis_map(y, *self.partition.y_bounds, self.gains.gy, self.anchor[1])

    def unmap_x(self, x):
        return axis_unmap(x, *self.partition.x_bounds, self.gains.gx, self.anchor[0])

    def unmap_y(self, y):
        return axis_unmap(y, *self.partition.y_bounds, self.gains.gy, self.anchor[1])

    def map_point(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return np.stack([self.map_x(p[..., 0]), self.map_y(p[..., 1])], axis=-1)

    def unmap_point(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        return np.stack([self.unmap_x(p[..., 0]), self.unmap_y(p[..., 1])], axis=-1)

    def with_anchor(self, anchor: tuple[float, float]) -> RescaleMap:
        return RescaleMap(self.partition, self.gains, (float(anchor[0]), float(anchor[1])), self.footprint)


def make_rescale_map(
    e: Environment,
    g: GainSet,
    *,
    alpha: tuple[float, float] = RATIO_BOUNDS,
    bounds: tuple[float, float] = GAIN_BOUNDS,
    anchor: tuple[float, float] | None = None,
) -> RescaleMap:
    report = check_constraints(g, alpha, bounds)
    if not report.feasible:
        raise ConstraintViolation(report)
    part = GridPartition.from_environment(e)
    if anchor is None:
        anchor = (part.x_bounds[0], part.y_bounds[0])
    return RescaleMap(part, g, anchor, e.footprint)


# --- smoothed runtime field -------------------------------------------------


def _ramp(t):
    return np.clip(0.5 * (t + 1.0), 0.0, 1.0)


def smoothed_axis_gain(v, b1: float, b2: float, g: tuple[float, float, float], l_s: float):
    """Band gains blended linearly within +-l_s of each band boundary.

    Each boundary contributes its gain step times a ramp that is 0 at -l_s,
    1/2 on the boundary and 1 at +l_s. Outside overlapping zones this is the
    usual two-band blend; when a band is narrower than 2*l_s the two ramps
    add up, which keeps the field continuous and within the band gains.
    """
    v = np.asarray(v, dtype=float)
    gl, gm, gr = g
    return gl + (gm - gl) * _ramp((v - b1) / l_s) + (gr - gm) * _ramp((v - b2) / l_s)


@dataclass(frozen=True)
class SmoothedGainField:
    map: RescaleMap
    l_s: float = SMOOTHING_HALF_WIDTH

    def __post_init__(self) -> None:
        if not self.l_s > 0:
            raise ValueError("smoothing half-width must be positive")

    def gain_x(self, x):
        return smoothed_axis_gain(x, *self.map.partition.x_bounds, self.map.gains.gx, self.l_s)

    def gain_y(self, y):
        return smoothed_axis_gain(y, *self.map.partition.y_bounds, self.map.gains.gy, self.l_s)

    def lipschitz_bound(self) -> float:
        steps = [abs(a - b) for gains in (self.map.gains.gx, self.map.gains.gy) for a, b in zip(gains, gains[1:])]
        return max(steps) / self.l_s


def gain_at(f: SmoothedGainField, p) -> tuple[float, float]:
    return float(f.gain_x(p[0])), float(f.gain_y(p[1]))


@dataclass(frozen=True)
class Walk:
    physical: np.ndarray  # (n, 2)
    virtual: np.ndarray  # (n, 2), in the rescaled frame
    gains: np.ndarray  # (n, 2), gains applied on the step ending at each sample

    def rows(self) -> np.ndarray:
        return np.hstack([self.physical, self.virtual, self.gains])


def simulate_walk(f: SmoothedGainField, physical_path, step: float = DEFAULT_STEP) -> Walk:
    """Integrate a physical polyline through the smoothed gain field.

    Each polyline leg is cut into equal sub-steps no longer than ``step``; the
    virtual displacement of a sub-step is its physical displacement scaled by
    the field gains at the sub-step midpoint. The walk starts at the rescaled
    image of the first physical point.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    path = np.asarray(physical_path, dtype=float)
    if path.ndim != 2 or path.shape[1] != 2 or len(path) < 1:
        raise ValueError("path must be a non-empty sequence of (x, y) points")
    foot = f.map.footprint
    if foot is not None:
        for x, y in path:
            if not foot.contains_point(x, y):
                raise GeometryError(f"path point ({x}, {y}) lies outside the physical footprint")

    pts = [path[:1]]
    for a, b in zip(path[:-1], path[1:]):
        n = max(1, math.ceil(np.hypot(*(b - a)) / step))
        t = np.arange(1, n + 1)[:, None] / n
        pts.append(a + t * (b - a))
    phys = np.concatenate(pts)

    d = np.diff(phys, axis=0)
    mid = phys[:-1] + 0.5 * d
    gx = f.gain_x(mid[:, 0])
    gy = f.gain_y(mid[:, 1])
    start = f.map.map_point(phys[0])
    virt = np.vstack([start, start + np.cumsum(d * np.column_stack([gx, gy]), axis=0)])
    g0 = np.array([[float(f.gain_x(phys[0, 0])), float(f.gain_y(phys[0, 1]))]])
    gains = np.vstack([g0, np.column_stack([gx, gy])])
    return Walk(phys, virt, gains)
