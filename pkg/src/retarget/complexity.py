"""Spatial complexity, object scatteredness, and pairwise dissimilarity."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from itertools import combinations
from typing import Protocol

import numpy as np

from .env import Environment
from .geom import Orientation, boundary_segments

SAMPLE_SPACING = 0.2
SMD_EPS = 1e-9


class KernelError(ValueError):
    pass


class ComplexityKernel(Protocol):
    def __call__(self, e: Environment) -> float: ...


@dataclass(frozen=True)
class ConstantKernel:
    """Returns a fixed, externally published C(E)."""

    value: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.value) and self.value > 0):
            raise KernelError(f"complexity value must be positive, got {self.value}")

    def __call__(self, e: Environment) -> float:
        return self.value


def _point_segment_distances(pts: np.ndarray, segs: np.ndarray) -> np.ndarray:
    """Distances (n_pts, n_segs) to axis-aligned segments given as rows
    (x0, y0, x1, y1) with x0 <= x1, y0 <= y1."""
    px, py = pts[:, 0:1], pts[:, 1:2]
    cx = np.clip(px, segs[:, 0], segs[:, 2])
    cy = np.clip(py, segs[:, 1], segs[:, 3])
    return np.hypot(px - cx, py - cy)


@dataclass(frozen=True)
class ClearanceKernel:
    """Clearance integrated over a regular sample grid.

    Samples sit on cell centres of a ``spacing`` grid over the footprint.
    Each sample strictly inside free space contributes its distance to the
    nearest object or wall; samples inside objects contribute zero. The sum is
    divided by the number of footprint samples, so removing an obstacle can
    only raise the value.
    """

    spacing: float = SAMPLE_SPACING
    max_refinements: int = 6

    def samples(self, e: Environment, spacing: float) -> np.ndarray:
        x0, y0, x1, y1 = e.footprint.bounds()
        xs = np.arange(x0 + spacing / 2, x1, spacing)
        ys = np.arange(y0 + spacing / 2, y1, spacing)
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        pts = np.column_stack([gx.ravel(), gy.ravel()])
        inside = np.zeros(len(pts), dtype=bool)
        for r in e.footprint.rects:
            inside |= (pts[:, 0] >= r.x_min) & (pts[:, 0] <= r.x_max) & (pts[:, 1] >= r.y_min) & (pts[:, 1] <= r.y_max)
        return pts[inside]

    def __call__(self, e: Environment) -> float:
        walls = boundary_segments(e.footprint)
        segs = [
            (s.lo, s.fixed, s.hi, s.fixed) if s.orientation is Orientation.HORIZONTAL else (s.fixed, s.lo, s.fixed, s.hi)
            for s in walls
        ]
        for o in e.objects:
            r = o.rect
            segs += [
                (r.x_min, r.y_min, r.x_max, r.y_min),
                (r.x_min, r.y_max, r.x_max, r.y_max),
                (r.x_min, r.y_min, r.x_min, r.y_max),
                (r.x_max, r.y_min, r.x_max, r.y_max),
            ]
        seg_arr = np.array(segs, dtype=float)
        spacing = self.spacing
        for _ in range(self.max_refinements + 1):
            pts = self.samples(e, spacing)
            occupied = np.zeros(len(pts), dtype=bool)
            for o in e.objects:
                r = o.rect
                occupied |= (pts[:, 0] >= r.x_min) & (pts[:, 0] <= r.x_max) & (pts[:, 1] >= r.y_min) & (pts[:, 1] <= r.y_max)
            free = pts[~occupied]
            if len(free):
                d = _point_segment_distances(free, seg_arr).min(axis=1)
                value = float(d.sum() / len(pts))
                if value > 0:
                    return value
            spacing /= 2
        raise KernelError(f"no free-space samples in {e.name!r}")


@dataclass(frozen=True)
class ComplexityReport:
    area: float
    c: float
    os: float
    sc: float

    def to_dict(self) -> dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class PairReport:
    sd: float
    smd: float
    cr: float
    smd_degenerate: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def object_scatteredness(e: Environment) -> float:
    centers = [o.center for o in e.objects]
    n = len(centers)
    if n < 2:
        return 0.0
    # ordered pairs count every distance twice
    total = 2.0 * sum(math.dist(a, b) for a, b in combinations(centers, 2))
    return (total / (2 * n)) ** 2


def spatial_complexity(
    e: Environment, kernel: ComplexityKernel | None = None, os_value: float | None = None
) -> ComplexityReport:
    kernel = kernel if kernel is not None else ClearanceKernel()
    c = float(kernel(e))
    if not c > 0:
        raise KernelError(f"complexity kernel returned non-positive C(E)={c}")
    area = e.area
    os_ = object_scatteredness(e) if os_value is None else float(os_value)
    return ComplexityReport(area, c, os_, math.sqrt(area) * c + os_)


def complexity_from_values(area: float, c: float, os_: float) -> ComplexityReport:
    return ComplexityReport(area, c, os_, math.sqrt(area) * c + os_)


def spatial_dissimilarity(a: ComplexityReport | float, b: ComplexityReport | float) -> float:
    sa = a.sc if isinstance(a, ComplexityReport) else float(a)
    sb = b.sc if isinstance(b, ComplexityReport) else float(b)
    if sa <= 0 or sb <= 0:
        raise ValueError("spatial complexity must be positive")
    return abs(math.log(sa) - math.log(sb))


def spatial_matching_difficulty(sd: float, virt_main_area: float, phys_main_area: float) -> tuple[float, bool]:
    """Returns (value, degenerate). Degenerate means sd was clamped to SMD_EPS."""
    if virt_main_area <= 0 or phys_main_area <= 0:
        raise ValueError("main object areas must be positive")
    if sd < 0:
        raise ValueError("sd must be non-negative")
    degenerate = sd < SMD_EPS
    sd = max(sd, SMD_EPS)
    return abs(math.log(sd * virt_main_area / phys_main_area)), degenerate


def complexity_ratio(c_virt: float, c_phys: float) -> float:
    if c_virt <= 0:
        raise ValueError("c_virt must be positive")
    return c_phys / c_virt


def pair_report(virt: ComplexityReport, phys: ComplexityReport, virt_main_area: float, phys_main_area: float) -> PairReport:
    sd = spatial_dissimilarity(virt, phys)
    smd, degenerate = spatial_matching_difficulty(sd, virt_main_area, phys_main_area)
    return PairReport(sd, smd, complexity_ratio(virt.c, phys.c), degenerate)
