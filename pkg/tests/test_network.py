import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from widthlab import fixtures
from widthlab.curves import great_circle
from widthlab.network import (GeodesicNetwork, Incidence, Junction, classify_junction,
                              density_bound_check, integer_density_filter, is_integer_density,
                              junction_in_plane, max_density, network_is_stationary,
                              stationarity_residual)
from widthlab.surface import EllipsoidParams

CASES = fixtures.junction_cases()


class TestResidual:
    def test_opposite_pairs(self):
        assert stationarity_residual(junction_in_plane(fixtures.NORTH, [0, 90, 180, 270])) < 1e-12

    def test_triple(self):
        assert stationarity_residual(junction_in_plane(fixtures.NORTH, [0, 120, 240])) < 1e-12

    def test_unbalanced_triple(self):
        assert stationarity_residual(junction_in_plane(fixtures.NORTH, [0, 115, 240])) > 0.05

    @given(st.lists(st.floats(0, 360), min_size=3, max_size=6),
           st.permutations(range(6)), st.integers(0, 2**32 - 1))
    def test_invariant_under_relabeling_and_rotation(self, angles, perm, seed):
        j = junction_in_plane(fixtures.NORTH, angles)
        order = [p for p in perm if p < len(angles)]
        shuffled = Junction(j.point, tuple(j.incident[i] for i in order))
        R = Rotation.random(random_state=seed).as_matrix()
        rotated = Junction(R @ j.point, tuple(Incidence(b.segment, R @ b.tangent, b.multiplicity)
                                              for b in j.incident))
        r = stationarity_residual(j)
        assert stationarity_residual(shuffled) == pytest.approx(r, abs=1e-12)
        assert stationarity_residual(rotated) == pytest.approx(r, abs=1e-12)


class TestJunctionValidation:
    def test_needs_three_branches(self):
        with pytest.raises(ValueError):
            junction_in_plane(fixtures.NORTH, [0, 180])

    def test_point_on_surface(self):
        with pytest.raises(ValueError):
            junction_in_plane(np.array([0, 0, 1.1]), [0, 120, 240])

    def test_tangency(self):
        with pytest.raises(ValueError):
            Junction(fixtures.NORTH, tuple(Incidence(i, [0, 0, 1.0]) for i in range(3)))


@pytest.mark.parametrize("case", CASES, ids=[c.name for c in CASES])
def test_hand_labeled_cases(case):
    assert classify_junction(case.junction) == case.expected_class
    assert is_integer_density(case.junction.density) == case.integer_density
    if case.balanced:
        assert stationarity_residual(case.junction) < 1e-12
    else:
        assert stationarity_residual(case.junction) > 1e-3


@given(st.lists(st.tuples(st.floats(0, 180), st.integers(1, 3)), min_size=2, max_size=4))
def test_regular_implies_balanced(lines):
    angles, mults = [], []
    for ang, m in lines:
        angles += [ang, ang + 180]
        mults += [m, m]
    j = junction_in_plane(fixtures.NORTH, angles, mults)
    assert classify_junction(j) == "regular"
    assert stationarity_residual(j) <= 1e-9


class TestNetworks:
    def test_crossing_ellipses(self, near_round):
        assert network_is_stationary(fixtures.crossing_ellipses(near_round)).stationary

    def test_y_network(self):
        assert network_is_stationary(fixtures.y_network()).stationary

    def test_broken_y_network_names_the_segment(self):
        rep = network_is_stationary(fixtures.broken_y_network())
        assert not rep.stationary
        assert [s for s, _ in rep.bad_segments] == [2]

    def test_validation_reports_dangling_ends(self):
        N = fixtures.y_network()
        bare = GeodesicNetwork(N.pieces, N.junctions[:1])
        assert any("in no junction" in p for p in bare.validate())

    def test_integer_density_filter(self):
        assert integer_density_filter(fixtures.crossing_circles([[1, 0, 0], [0, 1, 0]]))[0]
        ok, bad = integer_density_filter(fixtures.y_network())
        assert not ok and bad == [0, 1]
        assert integer_density_filter(GeodesicNetwork(((great_circle([0, 0, 1]), 2),)))[0]

    def test_triple_junctions_fail_the_filter(self):
        for c in CASES:
            if classify_junction(c.junction) == "triple":
                assert c.junction.density == 1.5

    def test_density_bound(self):
        assert density_bound_check(GeodesicNetwork(((great_circle([0, 0, 1]), 1),)), 2)
        circles = fixtures.crossing_circles([[1, 0, 0], [0, 1, 0]])
        assert max_density(circles) == 2 and density_bound_check(circles, 3)
        Y = fixtures.y_network()
        assert Y.mass == pytest.approx(3 * np.pi) and max_density(Y) == 1.5
        assert density_bound_check(Y, 2)

    def test_density_bound_refuses_ellipsoids(self, near_round):
        with pytest.raises(ValueError):
            density_bound_check(fixtures.crossing_ellipses(near_round), 3)

    def test_dichotomy_without_triples(self):
        # densities <= 2 and no triple junction: every junction is regular
        for N in (fixtures.crossing_circles([[1, 0, 0], [0, 1, 0]]),
                  fixtures.crossing_circles([[1, 0, 0], [0, 0.6, 0.8]]),
                  fixtures.crossing_ellipses(EllipsoidParams(0.95, 1, 1.05))):
            assert max_density(N) <= 2
            assert all(classify_junction(j) == "regular" for j in N.junctions)
