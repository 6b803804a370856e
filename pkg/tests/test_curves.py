import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from widthlab import fixtures
from widthlab.curves import (Cycle1, PolyCurve, Varifold1, ball_mass, great_circle,
                             latitude_circle, mass, varifold_density)

EQUATOR = great_circle([0, 0, 1], 720)


class TestMass:
    def test_equator(self):
        assert mass(Cycle1((EQUATOR,))) == pytest.approx(2 * np.pi, abs=1e-6)

    def test_latitude_circle(self):
        assert mass(Cycle1((latitude_circle(0.5, 720),))) == pytest.approx(
            2 * np.pi * np.sqrt(3) / 2, abs=1e-6)

    def test_two_great_circles(self):
        c = Cycle1((great_circle([1, 0, 0]), great_circle([0, 1, 0])))
        assert mass(c) == pytest.approx(4 * np.pi, abs=1e-6)

    def test_empty(self):
        assert mass(Cycle1()) == 0.0

    def test_multiplicity(self):
        assert mass(Varifold1(((EQUATOR, 3),))) == pytest.approx(6 * np.pi)

    @given(st.lists(st.floats(-0.95, 0.95), min_size=1, max_size=6))
    def test_additive(self, heights):
        curves = [latitude_circle(h, 128) for h in heights]
        total = mass(Cycle1(tuple(curves)))
        assert total == pytest.approx(sum(mass(c) for c in curves), rel=1e-12)


class TestCurveTypes:
    def test_cycles_need_closed_curves(self):
        with pytest.raises(ValueError):
            Cycle1((PolyCurve(np.eye(3)),))

    def test_rejects_repeated_vertices(self):
        with pytest.raises(ValueError):
            PolyCurve(np.array([[1.0, 0, 0], [1.0, 0, 0], [0, 1.0, 0]]))

    def test_rejects_zero_multiplicity(self):
        with pytest.raises(ValueError):
            Varifold1(((EQUATOR, 0),))


class TestBallMass:
    def test_half_equator(self):
        assert ball_mass(Cycle1((EQUATOR,)), [1, 0, 0], np.pi / 2) == pytest.approx(np.pi, abs=1e-3)

    def test_disjoint(self):
        assert ball_mass(Cycle1((EQUATOR,)), [0, 0, 1], np.pi / 4) == 0.0

    def test_rejects_bad_radius(self):
        with pytest.raises(ValueError):
            ball_mass(EQUATOR, [1, 0, 0], 0.0)

    @given(st.tuples(*[st.floats(-1, 1)] * 3).filter(lambda v: np.linalg.norm(v) > 0.1),
           st.floats(0.01, 3.0), st.floats(0.01, 3.0))
    def test_monotone_in_radius(self, center, r1, r2):
        lo, hi = sorted((r1, r2))
        c = Cycle1((latitude_circle(0.3, 256),))
        assert ball_mass(c, center, lo) <= ball_mass(c, center, hi) + 1e-12

    def test_converges_to_mass(self):
        c = Cycle1((latitude_circle(0.3, 256),))
        assert ball_mass(c, [0, 0, -1], np.pi - 1e-9) == pytest.approx(mass(c), rel=1e-9)


class TestDensity:
    def test_smooth_point(self):
        d = varifold_density(Varifold1(((EQUATOR, 1),)), [1, 0, 0])
        assert d.value == pytest.approx(1.0, abs=0.02) and d.converged

    @pytest.mark.parametrize("theta", [2, 3])
    def test_smooth_point_with_multiplicity(self, theta):
        d = varifold_density(Varifold1(((great_circle([0, 0, 1], 1024), theta),)), [0, 1, 0])
        assert d.value == pytest.approx(theta, rel=0.02)

    def test_crossing(self):
        V = Varifold1(((great_circle([1, 0, 0], 720), 1), (great_circle([0, 1, 0], 720), 1)))
        assert varifold_density(V, [0, 0, 1]).value == pytest.approx(2.0, abs=0.05)

    def test_triple_junction(self):
        V = Varifold1(fixtures.y_network(512).pieces)
        assert varifold_density(V, fixtures.NORTH).value == pytest.approx(1.5, abs=0.05)

    def test_scale_below_resolution_rejected(self):
        with pytest.raises(ValueError):
            varifold_density(Varifold1(((great_circle([0, 0, 1], 64), 1),)), [1, 0, 0], [0.2, 0.01])
