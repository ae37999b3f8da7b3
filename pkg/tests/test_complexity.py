import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from retarget import fixtures
from retarget.complexity import (
    ClearanceKernel,
    ComplexityReport,
    ConstantKernel,
    KernelError,
    complexity_from_values,
    complexity_ratio,
    object_scatteredness,
    pair_report,
    spatial_complexity,
    spatial_dissimilarity,
    spatial_matching_difficulty,
)
from retarget.env import make_environment


def _objects_at(xs):
    """Unit-width objects centred at the given x positions (first is the table)."""
    rects = [(x - 0.25, 4.75, x + 0.25, 5.25) for x in xs]
    return make_environment("row", [(-10, 0, 20, 10)], rects[0], rects[1:])


class TestScatteredness:
    def test_single(self):
        assert object_scatteredness(fixtures.load("simple")) == 0.0

    def test_two_objects(self):
        assert object_scatteredness(_objects_at([0, 4])) == pytest.approx(4.0)

    def test_three_collinear(self):
        assert object_scatteredness(_objects_at([0, 3, 6])) == pytest.approx(16.0)


class TestSpatialComplexity:
    def test_meeting_room_injected(self):
        rep = spatial_complexity(fixtures.load("meeting_room"), ConstantKernel(6.64), os_value=14.56)
        assert rep.sc == pytest.approx(math.sqrt(26.6) * 6.64 + 14.56)
        assert rep.sc == pytest.approx(48.81, abs=0.01)

    def test_studio_from_values(self):
        assert complexity_from_values(50.4, 6.50, 69.18).sc == pytest.approx(115.33, abs=5e-3)

    def test_empty_unit_room(self):
        e = make_environment("u", [(0, 0, 1, 1)], (0.4, 0.4, 0.6, 0.6))
        rep = spatial_complexity(e, ConstantKernel(2.5))
        assert rep.os == 0.0 and rep.sc == pytest.approx(2.5)

    def test_constant_kernel_must_be_positive(self):
        with pytest.raises(KernelError):
            ConstantKernel(0.0)
        with pytest.raises(KernelError):
            ConstantKernel(float("nan"))

    def test_clearance_positive_on_fixtures(self):
        for name in fixtures.NAMES:
            assert ClearanceKernel()(fixtures.load(name)) > 0

    def test_clearance_refines_tiny_free_space(self):
        # a 0.3 m room mostly filled by its table leaves no 0.2 m cell centre free
        e = make_environment("t", [(0, 0, 0.3, 0.3)], (0.0, 0.0, 0.3, 0.25))
        assert ClearanceKernel()(e) > 0

    def test_removing_obstacle_never_lowers_clearance(self):
        full = fixtures.load("xr_studio")
        k = ClearanceKernel()
        base = k(full)
        for i in range(len(full.obstacles)):
            obs = [o.rect.as_tuple() for j, o in enumerate(full.obstacles) if j != i]
            fewer = make_environment("f", [r.as_tuple() for r in full.footprint.rects], full.main_object.rect.as_tuple(), obs)
            assert k(fewer) >= base - 1e-12

    def test_report_dict(self):
        rep = complexity_from_values(1.0, 2.0, 3.0)
        assert ComplexityReport(**rep.to_dict()) == rep


class TestDissimilarity:
    def test_published_pairs(self):
        assert spatial_dissimilarity(115.30, 48.80) == pytest.approx(0.8598, abs=5e-5)
        assert spatial_dissimilarity(115.30, 17.42) == pytest.approx(1.8900, abs=5e-4)

    def test_identical(self):
        rep = complexity_from_values(4.0, 1.0, 2.0)
        assert spatial_dissimilarity(rep, rep) == 0.0

    def test_nonpositive(self):
        with pytest.raises(ValueError):
            spatial_dissimilarity(0.0, 1.0)

    def test_smd_published(self):
        assert spatial_matching_difficulty(0.6884, 3.28, 1.445)[0] == pytest.approx(0.4464, abs=5e-4)
        assert spatial_matching_difficulty(1.8900, 3.28, 1.80)[0] == pytest.approx(1.2367, abs=5e-4)

    def test_smd_equal_areas_unit_sd(self):
        assert spatial_matching_difficulty(1.0, 2.0, 2.0) == (0.0, False)

    def test_smd_degenerate(self):
        value, degenerate = spatial_matching_difficulty(0.0, 2.0, 2.0)
        assert degenerate and value == pytest.approx(-math.log(1e-9))

    def test_cr(self):
        assert complexity_ratio(6.50, 7.36) == pytest.approx(1.1323, abs=5e-5)
        assert complexity_ratio(6.50, 3.30) == pytest.approx(0.5077, abs=5e-5)
        assert complexity_ratio(3.0, 3.0) == 1.0

    def test_pair_report(self):
        v = complexity_from_values(50.4, 6.50, 69.18)
        p = complexity_from_values(9.45, 3.30, 9.27)
        rep = pair_report(v, p, 3.28, 1.80)
        assert rep.cr == pytest.approx(3.30 / 6.50)
        assert rep.sd == pytest.approx(abs(math.log(v.sc / p.sc)))
        assert not rep.smd_degenerate


cell = st.tuples(st.integers(-8, 8), st.integers(-8, 8))


@settings(max_examples=60, deadline=None)
@given(st.lists(cell, min_size=2, max_size=6, unique=True), st.floats(-5, 5), st.floats(-5, 5))
def test_scatteredness_translation_invariant(cells, dx, dy):
    # 0.2 m objects on a 0.5 m lattice never overlap
    rects = [(i * 0.5 - 0.1, j * 0.5 - 0.1, i * 0.5 + 0.1, j * 0.5 + 0.1) for i, j in cells]
    moved = [(a + dx, b + dy, c + dx, d + dy) for a, b, c, d in rects]
    a = make_environment("a", [(-20, -20, 20, 20)], rects[0], rects[1:])
    b = make_environment("b", [(-20, -20, 20, 20)], moved[0], moved[1:])
    assert object_scatteredness(a) == pytest.approx(object_scatteredness(b), rel=1e-9, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 500), st.floats(0.1, 500))
def test_sd_symmetric_nonnegative(a, b):
    assert spatial_dissimilarity(a, b) == spatial_dissimilarity(b, a) >= 0
