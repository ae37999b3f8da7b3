import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from retarget import fixtures
from retarget.env import (
    SceneError,
    SemanticLabel,
    dump_environment,
    environment_from_dict,
    environment_to_dict,
    free_space,
    label_region,
    load_environment,
    make_environment,
    wall_segments,
)
from retarget.geom import region_area, region_union, total_length


def _doc(**over):
    doc = {
        "name": "room",
        "footprint": [{"x_min": 0, "y_min": 0, "x_max": 4, "y_max": 4}],
        "objects": [{"id": "t", "label": "main_object", "rect": {"x_min": 1, "y_min": 1, "x_max": 2, "y_max": 2}}],
        "main_object_id": "t",
    }
    doc.update(over)
    return doc


def _code(doc):
    with pytest.raises(SceneError) as exc:
        environment_from_dict(doc)
    return exc.value.code


def test_xr_studio_fixture():
    e = fixtures.load("xr_studio")
    assert e.area == pytest.approx(50.4)
    assert e.main_object.rect.width == pytest.approx(4.10)
    assert e.main_object.rect.height == pytest.approx(0.80)


def test_fixture_dimensions():
    from helpers import SPACES

    for name, ((w, h), (tw, th)) in SPACES.items():
        e = fixtures.load(name)
        assert e.area == pytest.approx(w * h)
        assert e.main_object.rect.area == pytest.approx(tw * th)


def test_fixture_scatteredness_matches_published():
    from helpers import OS_VALUES
    from retarget.complexity import object_scatteredness

    for name, want in OS_VALUES.items():
        assert object_scatteredness(fixtures.load(name)) == pytest.approx(want, abs=5e-3)


def test_unknown_fixture():
    with pytest.raises(KeyError):
        fixtures.load("castle")


def test_duplicate_main_object():
    doc = _doc()
    doc["objects"].append({"id": "t2", "label": "main_object", "rect": {"x_min": 3, "y_min": 3, "x_max": 3.5, "y_max": 3.5}})
    assert _code(doc) == "duplicate main object"


def test_object_outside_footprint():
    doc = _doc()
    doc["objects"][0]["rect"]["x_max"] = 5
    assert _code(doc) == "object outside footprint"


@pytest.mark.parametrize(
    "change,code",
    [
        (dict(footprint=[]), "empty footprint"),
        (dict(main_object_id="nope"), "missing main object"),
        (dict(objects=[]), "missing main object"),
        (dict(footprint=[{"points": [[0, 0], [1, 0], [1, 1]]}]), "schema violation"),
        (dict(footprint=[{"x_min": 0, "y_min": 0, "x_max": 0, "y_max": 1}]), "degenerate rectangle"),
        (dict(name=3), "schema violation"),
    ],
)
def test_validation_codes(change, code):
    assert _code(_doc(**change)) == code


def test_duplicate_ids_and_overlap():
    doc = _doc()
    doc["objects"].append({"id": "t", "label": "obstacle", "rect": {"x_min": 3, "y_min": 3, "x_max": 3.5, "y_max": 3.5}})
    assert _code(doc) == "duplicate object id"
    doc = _doc()
    doc["objects"].append({"id": "o", "label": "obstacle", "rect": {"x_min": 1.5, "y_min": 1.5, "x_max": 3, "y_max": 3}})
    assert _code(doc) == "obstacle overlaps main object"


def test_no_free_space():
    doc = _doc()
    doc["objects"][0]["rect"] = {"x_min": 0, "y_min": 0, "x_max": 4, "y_max": 4}
    assert _code(doc) == "no free space"


def test_bad_json():
    with pytest.raises(SceneError):
        load_environment(b"{not json")


def test_free_space():
    simple = fixtures.load("simple")
    assert region_area(free_space(simple)) == 96.0
    e = make_environment("r", [(0, 0, 4, 4)], (3, 3, 4, 4), [(0, 0, 1, 1), (0, 0, 1, 1)])
    assert region_area(free_space(e)) == 14.0  # 16 - 1 (table) - 1 (both obstacles, counted once)


def test_free_space_obstacle_pair_only():
    # two stacked 1x1 obstacles in a 4x4 room; the table sits elsewhere
    e = make_environment("r", [(0, 0, 4, 4)], (3, 0, 4, 0.5), [(1, 1, 2, 2), (1, 1, 2, 2)])
    assert region_area(region_union(label_region(e, "obstacle"), label_region(e, "main_object"))) == 1.5


def test_label_regions():
    e = fixtures.load("xr_studio")
    assert region_area(label_region(e, SemanticLabel.MAIN_OBJECT)) == pytest.approx(3.28)
    assert label_region(fixtures.load("simple"), "obstacle").is_empty()
    assert label_region(e, "floor") == free_space(e)


def test_walls():
    e = fixtures.load("xr_studio")
    segs = wall_segments(e)
    assert len(segs) == 4 and total_length(segs) == pytest.approx(28.8)
    l_room = make_environment("l", [(0, 0, 3, 1), (0, 1, 1, 3)], (0.1, 0.1, 0.5, 0.5))
    assert len(wall_segments(l_room)) == 6


def test_walls_with_designated_object():
    e = fixtures.load("xr_lab")
    base = total_length(wall_segments(e))
    extra = total_length(wall_segments(e, ["obstacle_0"]))
    assert extra == pytest.approx(base + e.objects[1].rect.perimeter)
    with pytest.raises(SceneError):
        wall_segments(e, ["ghost"])


@pytest.mark.parametrize("name", fixtures.NAMES)
def test_roundtrip_fixtures(name):
    e = fixtures.load(name)
    again = load_environment(dump_environment(e))
    assert again == e
    assert environment_to_dict(again) == json.loads(fixtures.path(name).read_text())


coord = st.integers(0, 30).map(lambda v: v / 5)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(coord, coord), min_size=0, max_size=4))
def test_roundtrip_generated(corners):
    obstacles = [(x, y, x + 0.4, y + 0.4) for x, y in corners if not (x < 7.5 and x + 0.4 > 7 and y < 7.5 and y + 0.4 > 7)]
    e = make_environment("g", [(0, 0, 8, 8)], (7, 7, 7.5, 7.5), obstacles)
    assert load_environment(dump_environment(e)) == e
    # free space plus occupied ground always tiles the footprint
    occupied = region_union(label_region(e, "main_object"), label_region(e, "obstacle"))
    assert region_area(free_space(e)) + region_area(occupied) == pytest.approx(e.area)
