"""Rectilinear region algebra on unions of axis-aligned rectangles.

Every region in this package is a finite union of axis-aligned rectangles,
so exact areas and boolean operations reduce to coordinate compression: the
distinct x and y coordinates cut the plane into cells, each of which is either
fully covered or fully uncovered by a given region.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Protocol, Sequence

import numpy as np


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Rect:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self) -> None:
        vals = (self.x_min, self.y_min, self.x_max, self.y_max)
        if not all(math.isfinite(v) for v in vals):
            raise GeometryError(f"non-finite rectangle coordinates {vals}")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise GeometryError(f"degenerate rectangle {vals}: extents must be positive")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    @property
    def area(self) -> float:
        return self.width * self.height

    @property
    def perimeter(self) -> float:
        return 2.0 * (self.width + self.height)

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))

    def translated(self, dx: float, dy: float) -> Rect:
        return Rect(self.x_min + dx, self.y_min + dy, self.x_max + dx, self.y_max + dy)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x_min, self.y_min, self.x_max, self.y_max)


@dataclass(frozen=True)
class Region:
    """Union of rectangles. Overlaps are allowed; area counts covered ground once."""

    rects: tuple[Rect, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "rects", tuple(self.rects))

    @classmethod
    def of(cls, *rects: Rect) -> Region:
        return cls(tuple(rects))

    def is_empty(self) -> bool:
        return not self.rects

    def bounds(self) -> tuple[float, float, float, float]:
        if not self.rects:
            raise GeometryError("empty region has no bounds")
        arr = _as_array(self.rects)
        return (arr[:, 0].min(), arr[:, 1].min(), arr[:, 2].max(), arr[:, 3].max())

    def translated(self, dx: float, dy: float) -> Region:
        return Region(tuple(r.translated(dx, dy) for r in self.rects))

    def contains_point(self, x: float, y: float) -> bool:
        """Closed containment (boundary counts as inside)."""
        return any(r.x_min <= x <= r.x_max and r.y_min <= y <= r.y_max for r in self.rects)


class Orientation(str, Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"


@dataclass(frozen=True)
class Segment:
    """Axis-aligned segment. ``fixed`` is y for horizontal, x for vertical."""

    orientation: Orientation
    fixed: float
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise GeometryError(f"segment needs lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def endpoints(self) -> tuple[tuple[float, float], tuple[float, float]]:
        if self.orientation is Orientation.HORIZONTAL:
            return (self.lo, self.fixed), (self.hi, self.fixed)
        return (self.fixed, self.lo), (self.fixed, self.hi)


class AxisMap(Protocol):
    def map_x(self, x): ...

    def map_y(self, y): ...


# --- coordinate compression -------------------------------------------------


def _as_array(rects: Sequence[Rect]) -> np.ndarray:
    if not rects:
        return np.empty((0, 4))
    return np.array([r.as_tuple() for r in rects], dtype=float)


def _grid(*groups: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    stacked = np.concatenate([g for g in groups if len(g)] or [np.empty((0, 4))])
    xs = np.unique(np.concatenate([stacked[:, 0], stacked[:, 2]]))
    ys = np.unique(np.concatenate([stacked[:, 1], stacked[:, 3]]))
    return xs, ys


def _coverage(arr: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Boolean cell mask of shape (len(xs)-1, len(ys)-1)."""
    mask = np.zeros((max(len(xs) - 1, 0), max(len(ys) - 1, 0)), dtype=bool)
    if not len(arr):
        return mask
    i0 = np.searchsorted(xs, arr[:, 0])
    i1 = np.searchsorted(xs, arr[:, 2])
    j0 = np.searchsorted(ys, arr[:, 1])
    j1 = np.searchsorted(ys, arr[:, 3])
    for a, b, c, d in zip(i0, i1, j0, j1):
        mask[a:b, c:d] = True
    return mask


def _cell_areas(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    return np.outer(np.diff(xs), np.diff(ys))


def _mask_to_region(mask: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> Region:
    """Merge covered cells into rectangles: vertical runs per column, then
    identical runs across neighbouring columns."""
    open_runs: dict[tuple[int, int], int] = {}
    out: list[tuple[int, int, int, int]] = []
    ncols = mask.shape[0]
    for i in range(ncols + 1):
        runs: set[tuple[int, int]] = set()
        if i < ncols:
            col = mask[i]
            j = 0
            n = len(col)
            while j < n:
                if col[j]:
                    k = j
                    while k < n and col[k]:
                        k += 1
                    runs.add((j, k))
                    j = k
                else:
                    j += 1
        for run in list(open_runs):
            if run not in runs:
                out.append((open_runs.pop(run), i, run[0], run[1]))
        for run in runs:
            open_runs.setdefault(run, i)
    out.sort(key=lambda t: (t[2], t[0]))
    return Region(
        tuple(Rect(float(xs[a]), float(ys[c]), float(xs[b]), float(ys[d])) for a, b, c, d in out)
    )


def _boolean(a: Region, b: Region, op) -> Region:
    arr_a, arr_b = _as_array(a.rects), _as_array(b.rects)
    xs, ys = _grid(arr_a, arr_b)
    if len(xs) < 2:
        return Region()
    mask = op(_coverage(arr_a, xs, ys), _coverage(arr_b, xs, ys))
    return _mask_to_region(mask, xs, ys)


# --- public operations ------------------------------------------------------


def region_area(r: Region) -> float:
    arr = _as_array(r.rects)
    if not len(arr):
        return 0.0
    xs, ys = _grid(arr)
    return float((_cell_areas(xs, ys) * _coverage(arr, xs, ys)).sum())


def region_intersection(a: Region, b: Region) -> Region:
    return _boolean(a, b, np.logical_and)


def region_union(a: Region, b: Region) -> Region:
    return _boolean(a, b, np.logical_or)


def region_difference(a: Region, b: Region) -> Region:
    return _boolean(a, b, lambda p, q: p & ~q)


def boundary_segments(r: Region) -> list[Segment]:
    """Maximal axis-aligned runs of the boundary of the covered set."""
    arr = _as_array(r.rects)
    if not len(arr):
        return []
    xs, ys = _grid(arr)
    mask = np.pad(_coverage(arr, xs, ys), 1)
    # vertical edges sit on xs[i] between padded columns i and i+1
    vert = mask[:-1, 1:-1] != mask[1:, 1:-1]
    horiz = mask[1:-1, :-1] != mask[1:-1, 1:]
    segs: list[Segment] = []
    for i, x in enumerate(xs):
        segs.extend(
            Segment(Orientation.VERTICAL, float(x), float(ys[j]), float(ys[k]))
            for j, k in _runs(vert[i])
        )
    for j, y in enumerate(ys):
        segs.extend(
            Segment(Orientation.HORIZONTAL, float(y), float(xs[i]), float(xs[k]))
            for i, k in _runs(horiz[:, j])
        )
    return segs


def _runs(flags: np.ndarray) -> Iterable[tuple[int, int]]:
    idx = np.flatnonzero(np.diff(np.concatenate(([0], flags.astype(np.int8), [0]))))
    return zip(idx[::2], idx[1::2])


def rect_segments(r: Rect) -> list[Segment]:
    """The four sides of a rectangle (bottom, top, left, right)."""
    return [
        Segment(Orientation.HORIZONTAL, r.y_min, r.x_min, r.x_max),
        Segment(Orientation.HORIZONTAL, r.y_max, r.x_min, r.x_max),
        Segment(Orientation.VERTICAL, r.x_min, r.y_min, r.y_max),
        Segment(Orientation.VERTICAL, r.x_max, r.y_min, r.y_max),
    ]


def union_length(intervals: Iterable[tuple[float, float]]) -> float:
    total = 0.0
    cur_lo = cur_hi = None
    for lo, hi in sorted(intervals):
        if cur_hi is None or lo > cur_hi:
            if cur_hi is not None:
                total += cur_hi - cur_lo
            cur_lo, cur_hi = lo, hi
        elif hi > cur_hi:
            cur_hi = hi
    if cur_hi is not None:
        total += cur_hi - cur_lo
    return total


def matched_intervals(
    subject: Sequence[Segment], target: Sequence[Segment], tol: float
) -> list[Segment]:
    """Sub-segments of ``subject`` covered by a parallel target segment whose
    fixed coordinate is closer than ``tol``. Returned on the subject's line,
    merged per subject segment."""
    if tol <= 0:
        raise GeometryError("edge tolerance must be positive")
    out: list[Segment] = []
    for s in subject:
        ivs = []
        for t in target:
            if t.orientation is s.orientation and abs(t.fixed - s.fixed) < tol:
                lo, hi = max(s.lo, t.lo), min(s.hi, t.hi)
                if hi > lo:
                    ivs.append((lo, hi))
        ivs.sort()
        cur = None
        for lo, hi in ivs:
            if cur is None or lo > cur[1]:
                if cur is not None:
                    out.append(Segment(s.orientation, s.fixed, *cur))
                cur = [lo, hi]
            elif hi > cur[1]:
                cur[1] = hi
        if cur is not None:
            out.append(Segment(s.orientation, s.fixed, *cur))
    return out


def matched_edge_length(subject: Sequence[Segment], target: Sequence[Segment], tol: float) -> float:
    return sum(seg.length for seg in matched_intervals(subject, target, tol))


def total_length(segments: Iterable[Segment]) -> float:
    return sum(s.length for s in segments)


def transform_rect(r: Rect, m: AxisMap) -> Rect:
    xs = m.map_x(np.array([r.x_min, r.x_max]))
    ys = m.map_y(np.array([r.y_min, r.y_max]))
    return Rect(float(xs[0]), float(ys[0]), float(xs[1]), float(ys[1]))


def transform_region(r: Region, m: AxisMap) -> Region:
    """Push every rectangle through a separable, per-axis increasing map."""
    if not r.rects:
        return Region()
    arr = _as_array(r.rects)
    x0, x1 = m.map_x(arr[:, 0]), m.map_x(arr[:, 2])
    y0, y1 = m.map_y(arr[:, 1]), m.map_y(arr[:, 3])
    return Region(
        tuple(Rect(float(a), float(b), float(c), float(d)) for a, b, c, d in zip(x0, y0, x1, y1))
    )


def transform_segments(segs: Sequence[Segment], m: AxisMap) -> list[Segment]:
    out = []
    for s in segs:
        if s.orientation is Orientation.HORIZONTAL:
            fixed = m.map_y(np.array([s.fixed]))[0]
            lo, hi = m.map_x(np.array([s.lo, s.hi]))
        else:
            fixed = m.map_x(np.array([s.fixed]))[0]
            lo, hi = m.map_y(np.array([s.lo, s.hi]))
        out.append(Segment(s.orientation, float(fixed), float(lo), float(hi)))
    return out
