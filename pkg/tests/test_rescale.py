import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from retarget import fixtures
from retarget.env import make_environment
from retarget.geom import GeometryError
from retarget.rescale import (
    ConstraintViolation,
    GainSet,
    GridPartition,
    RescaleMap,
    SmoothedGainField,
    axis_map,
    axis_unmap,
    check_constraints,
    gain_at,
    make_rescale_map,
    simulate_walk,
    smoothed_axis_gain,
)


class TestConstraints:
    def test_published_single_gains_feasible(self):
        rep = check_constraints(GainSet.uniform(1.0392, 1.0733))
        assert rep.feasible
        assert 1.0733 / 1.0392 == pytest.approx(1.0328, abs=1e-4)

    def test_ratio_violation(self):
        rep = check_constraints(GainSet.uniform(1.25, 0.87))
        assert not rep.feasible
        assert 1.25 / 0.87 == pytest.approx(1.4368, abs=1e-4)
        assert sorted(rep.failed()) == ["ratio max(gx)/min(gy) <= alpha_high", "ratio min(gx)/max(gy) <= alpha_high"]

    def test_identity_has_slack(self):
        rep = check_constraints(GainSet.identity())
        assert rep.feasible and rep.worst < 0
        assert len(rep.violations) == 10

    def test_out_of_box_gain_named(self):
        e = fixtures.load("home")
        with pytest.raises(ConstraintViolation) as exc:
            make_rescale_map(e, GainSet.uniform(0.5, 1.0))
        assert "gain bound gx[0]" in exc.value.report.failed()

    def test_bad_gainset(self):
        with pytest.raises(ValueError):
            GainSet((1.0, 1.0), (1.0, 1.0, 1.0))
        with pytest.raises(ValueError):
            GainSet((1.0, -1.0, 1.0), (1.0, 1.0, 1.0))


class TestAxisMap:
    def test_identity_exact(self):
        v = np.linspace(-3, 9, 101)
        assert np.array_equal(axis_map(v, 1, 2, (1, 1, 1), 0.5), v)

    def test_middle_band(self):
        out = axis_map(np.array([0.0, 3.95]), 0.0, 3.95, (1.0, 1.0384, 1.0), 0.0)
        assert out[1] - out[0] == pytest.approx(4.10168, abs=1e-9)

    def test_equal_band_gains_equal_single_gain(self):
        v = np.linspace(-2, 8, 57)
        g = 1.0733
        assert np.array_equal(axis_map(v, 1.5, 4.0, (g, g, g), 1.5), 1.5 + g * (v - 1.5))

    def test_anchor_fixed(self):
        assert axis_map(np.array(2.7), 1, 3, (0.9, 1.2, 1.1), 2.7) == pytest.approx(2.7)

    def test_unmap_roundtrip(self):
        v = np.linspace(-2, 8, 57)
        g = (0.9, 1.2, 1.1)
        w = axis_map(v, 1, 3, g, 0.4)
        assert np.allclose(axis_unmap(w, 1, 3, g, 0.4), v, atol=1e-12)

    def test_map_point(self):
        e = fixtures.load("xr_lab")
        m = make_rescale_map(e, GainSet.uniform(1.04, 1.06))
        p = np.array([[3.0, 3.0]])
        assert np.allclose(m.unmap_point(m.map_point(p)), p)


class TestSmoothing:
    g = (1.0, 1.2, 1.2)

    def test_band_center(self):
        assert smoothed_axis_gain(3.0, 1.0, 5.0, self.g, 0.25) == pytest.approx(1.2)

    def test_on_boundary(self):
        assert smoothed_axis_gain(1.0, 1.0, 5.0, self.g, 0.25) == pytest.approx(1.1)

    def test_half_width_inside(self):
        assert smoothed_axis_gain(1.125, 1.0, 5.0, self.g, 0.25) == pytest.approx(1.15)

    def test_narrow_band_stays_within_gains(self):
        g = (0.9, 1.2, 1.0)
        v = np.linspace(-1, 2, 3001)
        out = smoothed_axis_gain(v, 0.4, 0.6, g, 0.25)
        assert out.min() >= 0.9 - 1e-12 and out.max() <= 1.2 + 1e-12

    def test_bad_half_width(self):
        e = fixtures.load("home")
        with pytest.raises(ValueError):
            SmoothedGainField(make_rescale_map(e, GainSet.identity()), l_s=0)


def _field(gx, gy, room=(0, 0, 6, 4), table=(2, 1, 4, 3)):
    e = make_environment("r", [room], table)
    return SmoothedGainField(make_rescale_map(e, GainSet(gx, gy)))


class TestWalk:
    def test_identity_walk(self):
        f = _field((1, 1, 1), (1, 1, 1))
        path = [(0.5, 0.5), (5.5, 0.5), (5.5, 3.5), (1.0, 2.0)]
        w = simulate_walk(f, path)
        assert np.allclose(w.virtual, w.physical, atol=1e-12)

    def test_single_band_length(self):
        f = _field((1.2, 1.2, 1.2), (1.0, 1.0, 1.0))
        w = simulate_walk(f, [(2.5, 2.0), (3.5, 2.0)])
        # 1 m inside the middle band; the field is constant 1.2 everywhere
        assert w.virtual[-1, 0] - w.virtual[0, 0] == pytest.approx(1.2, abs=1e-12)
        f = _field((1.2, 1.2, 1.2), (1, 1, 1), room=(0, 0, 10, 4), table=(4, 1, 6, 3))
        w = simulate_walk(f, [(0.5, 2.0), (2.5, 2.0)])
        assert w.virtual[-1, 0] - w.virtual[0, 0] == pytest.approx(2.4, abs=1e-12)

    def test_crossing_boundary_close_to_piecewise(self):
        gx, ls = (1.0, 1.2, 1.0), 0.25
        f = _field(gx, (1, 1, 1))
        w = simulate_walk(f, [(1.0, 0.5), (3.0, 0.5)], step=0.01)
        smooth = w.virtual[-1, 0] - w.virtual[0, 0]
        sharp = float(np.diff(f.map.map_x(np.array([1.0, 3.0])))[0])
        assert abs(smooth - sharp) <= 0.2 * ls / 2 + 0.01

    def test_gains_reported(self):
        f = _field((0.95, 1.0, 1.1), (1, 1, 1))
        w = simulate_walk(f, [(0.5, 0.5), (5.5, 0.5)], step=0.05)
        assert w.gains[1, 0] == pytest.approx(0.95)
        assert w.gains[-1, 0] == pytest.approx(1.1)
        assert w.rows().shape == (len(w.physical), 6)

    def test_outside_footprint(self):
        f = _field((1, 1, 1), (1, 1, 1))
        with pytest.raises(GeometryError):
            simulate_walk(f, [(0.5, 0.5), (7.0, 0.5)])

    def test_gain_at(self):
        f = _field((0.95, 1.0, 1.05), (1.02, 1.0, 0.98))
        assert gain_at(f, (0.5, 0.5)) == pytest.approx((0.95, 1.02))


gain = st.floats(0.9, 1.1)


@settings(max_examples=80, deadline=None)
@given(st.tuples(gain, gain, gain), st.floats(-1, 1), st.floats(0.05, 3), st.floats(-2, 2))
def test_axis_map_monotone_and_continuous(g, b1, width, anchor):
    b2 = b1 + width
    v = np.linspace(b1 - 3, b2 + 3, 2001)
    w = axis_map(v, b1, b2, g, anchor)
    d = np.diff(w) / np.diff(v)
    assert np.all(d > 0)
    assert d.max() <= max(g) + 1e-9 and d.min() >= min(g) - 1e-9


@settings(max_examples=80, deadline=None)
@given(st.tuples(gain, gain, gain), st.floats(0.05, 3), st.floats(0.05, 0.5))
def test_smoothed_gain_lipschitz(g, width, ls):
    v = np.linspace(-3, width + 3, 4001)
    out = smoothed_axis_gain(v, 0.0, width, g, ls)
    slope = np.abs(np.diff(out) / np.diff(v)).max()
    bound = max(abs(g[1] - g[0]), abs(g[2] - g[1])) / ls
    assert slope <= bound + 1e-6


@settings(max_examples=60, deadline=None)
@given(st.floats(0.87, 1.25), st.floats(0.87, 1.25))
def test_uniform_map_is_affine(gx, gy):
    part = GridPartition((1.0, 2.0), (1.0, 3.0))
    m = RescaleMap(part, GainSet.uniform(gx, gy), (1.0, 1.0))
    p = np.array([[0.0, 0.0], [4.0, 5.0]])
    q = m.map_point(p)
    assert q[1, 0] - q[0, 0] == pytest.approx(4 * gx)
    assert q[1, 1] - q[0, 1] == pytest.approx(5 * gy)
