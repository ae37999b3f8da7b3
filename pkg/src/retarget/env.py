"""Semantic floorplans: a floor footprint, one main object, and obstacles."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Iterable

from .geom import (
    GeometryError,
    Rect,
    Region,
    Segment,
    boundary_segments,
    region_area,
    region_difference,
    region_intersection,
)

AREA_EPS = 1e-9


class SemanticLabel(str, Enum):
    FLOOR = "floor"
    MAIN_OBJECT = "main_object"
    OBSTACLE = "obstacle"


class SceneError(ValueError):
    """Invalid environment document. ``code`` names the violated rule."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass(frozen=True)
class SceneObject:
    id: str
    label: SemanticLabel
    rect: Rect

    @property
    def center(self) -> tuple[float, float]:
        return self.rect.center


@dataclass(frozen=True)
class Environment:
    name: str
    footprint: Region
    objects: tuple[SceneObject, ...]
    main_object_id: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "objects", tuple(self.objects))
        _validate(self)

    @property
    def main_object(self) -> SceneObject:
        return next(o for o in self.objects if o.id == self.main_object_id)

    @property
    def obstacles(self) -> tuple[SceneObject, ...]:
        return tuple(o for o in self.objects if o.label is SemanticLabel.OBSTACLE)

    @property
    def area(self) -> float:
        return region_area(self.footprint)


def _validate(e: Environment) -> None:
    if not e.footprint.rects:
        raise SceneError("empty footprint", f"environment {e.name!r} has no floor rectangles")
    foot_area = region_area(e.footprint)
    if foot_area <= 0:
        raise SceneError("empty footprint", "footprint area must be positive")

    ids = [o.id for o in e.objects]
    dup = {i for i in ids if ids.count(i) > 1}
    if dup:
        raise SceneError("duplicate object id", f"ids {sorted(dup)} appear more than once")

    mains = [o for o in e.objects if o.label is SemanticLabel.MAIN_OBJECT]
    if len(mains) > 1:
        raise SceneError("duplicate main object", f"{[o.id for o in mains]} are all labelled main_object")
    if not mains:
        raise SceneError("missing main object", "no object carries the main_object label")
    if mains[0].id != e.main_object_id:
        raise SceneError(
            "missing main object",
            f"main_object_id {e.main_object_id!r} does not name the main_object {mains[0].id!r}",
        )

    for o in e.objects:
        if o.label is SemanticLabel.FLOOR:
            raise SceneError("schema violation", f"object {o.id!r} cannot carry the floor label")
        outside = region_area(region_difference(Region.of(o.rect), e.footprint))
        if outside > AREA_EPS:
            raise SceneError("object outside footprint", f"object {o.id!r} extends {outside:.4g} m² past the floor")

    main = Region.of(mains[0].rect)
    for o in e.objects:
        if o.label is SemanticLabel.OBSTACLE:
            if region_area(region_intersection(main, Region.of(o.rect))) > AREA_EPS:
                raise SceneError("obstacle overlaps main object", f"obstacle {o.id!r} overlaps {mains[0].id!r}")

    occupied = Region(tuple(o.rect for o in e.objects))
    if region_area(region_difference(e.footprint, occupied)) <= AREA_EPS:
        raise SceneError("no free space", f"objects cover the whole floor of {e.name!r}")


# --- queries ----------------------------------------------------------------


def free_space(e: Environment) -> Region:
    return region_difference(e.footprint, Region(tuple(o.rect for o in e.objects)))


def label_region(e: Environment, label: SemanticLabel) -> Region:
    label = SemanticLabel(label)
    if label is SemanticLabel.FLOOR:
        return free_space(e)
    if label is SemanticLabel.MAIN_OBJECT:
        return Region.of(e.main_object.rect)
    return Region(tuple(o.rect for o in e.obstacles))


def wall_segments(e: Environment, include_objects: Iterable[str] = ()) -> list[Segment]:
    """Vertical-plane set: the footprint outline, optionally extended with the
    outlines of designated objects (whiteboards, cabinets...)."""
    segs = boundary_segments(e.footprint)
    by_id = {o.id: o for o in e.objects}
    for oid in include_objects:
        if oid not in by_id:
            raise SceneError("schema violation", f"unknown object id {oid!r}")
        segs.extend(boundary_segments(Region.of(by_id[oid].rect)))
    return segs


# --- serialization ----------------------------------------------------------

_RECT_KEYS = ("x_min", "y_min", "x_max", "y_max")


def _parse_rect(obj: Any, where: str) -> Rect:
    if not isinstance(obj, dict):
        raise SceneError("schema violation", f"{where} must be an object with {_RECT_KEYS}")
    if "points" in obj or "polygon" in obj:
        raise SceneError("schema violation", f"{where}: only axis-aligned rectangles are supported")
    missing = [k for k in _RECT_KEYS if k not in obj]
    if missing:
        raise SceneError("schema violation", f"{where} is missing {missing}")
    vals = []
    for k in _RECT_KEYS:
        v = obj[k]
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise SceneError("schema violation", f"{where}.{k} must be a finite number")
        vals.append(float(v))
    try:
        return Rect(*vals)
    except GeometryError as exc:
        raise SceneError("degenerate rectangle", f"{where}: {exc}") from None


def environment_from_dict(doc: Any) -> Environment:
    if not isinstance(doc, dict):
        raise SceneError("schema violation", "top level must be a JSON object")
    for key, kind in (("name", str), ("footprint", list), ("objects", list), ("main_object_id", str)):
        if key not in doc:
            raise SceneError("schema violation", f"missing key {key!r}")
        if not isinstance(doc[key], kind):
            raise SceneError("schema violation", f"{key!r} must be a {kind.__name__}")
    footprint = Region(tuple(_parse_rect(r, f"footprint[{i}]") for i, r in enumerate(doc["footprint"])))
    objects = []
    for i, o in enumerate(doc["objects"]):
        if not isinstance(o, dict) or not {"id", "label", "rect"} <= o.keys():
            raise SceneError("schema violation", f"objects[{i}] needs id, label and rect")
        if not isinstance(o["id"], str):
            raise SceneError("schema violation", f"objects[{i}].id must be a string")
        if o["label"] not in (SemanticLabel.MAIN_OBJECT.value, SemanticLabel.OBSTACLE.value):
            raise SceneError("schema violation", f"objects[{i}].label must be main_object or obstacle")
        objects.append(SceneObject(o["id"], SemanticLabel(o["label"]), _parse_rect(o["rect"], f"objects[{i}].rect")))
    return Environment(doc["name"], footprint, tuple(objects), doc["main_object_id"])


def load_environment(document: bytes | str) -> Environment:
    try:
        doc = json.loads(document)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SceneError("schema violation", f"not valid JSON: {exc}") from None
    return environment_from_dict(doc)


def load_environment_file(path: str | Path) -> Environment:
    return load_environment(Path(path).read_bytes())


def _rect_dict(r: Rect) -> dict[str, float]:
    return dict(zip(_RECT_KEYS, r.as_tuple()))


def environment_to_dict(e: Environment) -> dict[str, Any]:
    return {
        "name": e.name,
        "footprint": [_rect_dict(r) for r in e.footprint.rects],
        "objects": [{"id": o.id, "label": o.label.value, "rect": _rect_dict(o.rect)} for o in e.objects],
        "main_object_id": e.main_object_id,
    }


def dump_environment(e: Environment) -> bytes:
    return json.dumps(environment_to_dict(e), indent=2).encode("utf-8")


def make_environment(
    name: str,
    footprint: Iterable[tuple[float, float, float, float]],
    main: tuple[float, float, float, float],
    obstacles: Iterable[tuple[float, float, float, float]] = (),
    main_id: str = "table",
) -> Environment:
    """Shorthand for building scenes in code from (x_min, y_min, x_max, y_max) tuples."""
    objs = [SceneObject(main_id, SemanticLabel.MAIN_OBJECT, Rect(*main))]
    objs += [SceneObject(f"obstacle_{i}", SemanticLabel.OBSTACLE, Rect(*r)) for i, r in enumerate(obstacles)]
    return Environment(name, Region(tuple(Rect(*r) for r in footprint)), tuple(objs), main_id)
