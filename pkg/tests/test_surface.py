import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from widthlab.surface import (SPHERE, EllipsoidParams, GeodesicStepError, TangentVector,
                              geodesic_shoot, principal_ellipse, principal_lengths,
                              project_to_surface, reshoot_defect)

coef = st.floats(0.9, 1.1)
vec = st.tuples(*[st.floats(-3, 3)] * 3).filter(lambda v: np.linalg.norm(v) > 0.1)


class TestEllipsoidParams:
    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            EllipsoidParams(1.0, 0.0, 1.0)

    @pytest.mark.parametrize("a,expected", [((1, 1, 1), True), ((0.9, 1, 1.1), True),
                                            ((0.89, 1, 1), False), ((1, 1, 1.2), False)])
    def test_near_round(self, a, expected):
        assert EllipsoidParams(*a).near_round is expected

    def test_parse(self):
        assert EllipsoidParams.parse("0.95,1,1.05") == EllipsoidParams(0.95, 1.0, 1.05)
        with pytest.raises(ValueError):
            EllipsoidParams.parse("1,2")

    def test_semi_axes_follow_the_quadric(self, near_round):
        x = np.diag(near_round.semi_axes)
        np.testing.assert_allclose(near_round.quadric(x), 0, atol=1e-15)

    def test_gauss_curvature_of_sphere(self):
        assert SPHERE.gauss_curvature(np.array([0.6, 0.8, 0.0])) == pytest.approx(1.0)


class TestProjection:
    def test_radial_on_sphere(self):
        np.testing.assert_allclose(project_to_surface([2, 0, 0]), [1, 0, 0], atol=1e-15)

    def test_identity_on_surface(self):
        np.testing.assert_array_equal(project_to_surface([1.0, 0, 0], SPHERE), [1, 0, 0])

    def test_residual(self, near_round):
        p = project_to_surface([1.0, 1.0, 1.0], near_round)
        assert abs(near_round.quadric(p)) < 1e-10

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            project_to_surface([0, 0, 0])

    @given(vec, coef, coef, coef)
    def test_projection_residual_and_idempotence(self, p, a1, a2, a3):
        E = EllipsoidParams(a1, a2, a3)
        x = project_to_surface(np.array(p), E)
        assert abs(E.quadric(x)) <= 1e-10
        np.testing.assert_allclose(project_to_surface(x, E), x, atol=1e-12)


class TestGeodesicShoot:
    def test_great_circle_antipode(self):
        c = geodesic_shoot(TangentVector([1, 0, 0], [0, 1, 0]), np.pi)
        np.testing.assert_allclose(c.vertices[-1], [-1, 0, 0], atol=1e-8)
        assert c.length == pytest.approx(np.pi, rel=1e-12)

    def test_symmetry_plane_is_invariant(self):
        E = EllipsoidParams(0.98, 1.0, 1.02)
        start = TangentVector(project_to_surface([0, 0.6, 0.8], E), [0, 0.8, -0.6], E).unit()
        c = geodesic_shoot(start, 5.0)
        assert np.abs(c.vertices[:, 0]).max() < 1e-9

    def test_half_step_self_consistency(self, near_round):
        start = TangentVector(project_to_surface([0.3, 0.5, 0.8], near_round), [1, -0.2, 0.1],
                              near_round).unit()
        a = geodesic_shoot(start, 1.0, step=0.01)
        b = geodesic_shoot(start, 1.0, step=0.005)
        assert np.linalg.norm(a.vertices[-1] - b.vertices[-1]) < 1e-8

    def test_coarse_step_rejected(self, near_round):
        start = TangentVector(project_to_surface([0.3, 0.5, 0.8], near_round), [1, 0, 0],
                              near_round).unit()
        with pytest.raises(GeodesicStepError):
            geodesic_shoot(start, 6.0, step=1.0)

    def test_rejects_non_unit_direction(self):
        with pytest.raises(ValueError):
            geodesic_shoot(TangentVector([1, 0, 0], [0, 2, 0]), 1.0)

    @given(vec, vec)
    def test_sphere_geodesics_lie_on_great_circles(self, p, v):
        start = TangentVector(np.array(p), np.array(v))
        if np.linalg.norm(start.v) < 1e-3:
            return
        c = geodesic_shoot(start.unit(), 2.0, check=False)
        n = np.linalg.svd(c.vertices)[2][-1]
        assert np.abs(c.vertices @ n).max() < 1e-7
        np.testing.assert_allclose(np.linalg.norm(c.tangents, axis=1), 1.0, atol=1e-8)


class TestPrincipalEllipses:
    def test_equator_of_sphere(self):
        assert principal_ellipse(3, SPHERE, 512).length == pytest.approx(2 * np.pi, abs=1e-6)

    @pytest.mark.parametrize("a", [(0.95, 1.0, 1.05), (0.91, 0.97, 1.08), (0.99, 1.0, 1.01)])
    def test_length_order(self, a):
        L = principal_lengths(EllipsoidParams(*a))
        assert L[0] < L[1] < L[2]
        assert 2 * np.pi * 0.75 < L[0] and L[2] < 2 * np.pi * 1.25

    def test_quadrature_oracle(self, near_round):
        A, B = 1 / np.sqrt(1.0), 1 / np.sqrt(1.05)
        ref, _ = quad(lambda t: np.hypot(A * np.sin(t), B * np.cos(t)), 0, 2 * np.pi,
                      epsabs=1e-13, epsrel=1e-13, limit=200)
        assert principal_ellipse(1, near_round, 512).length == pytest.approx(ref, abs=1e-6)

    @pytest.mark.parametrize("i", [1, 2, 3])
    def test_reshooting_reproduces_the_ellipse(self, near_round, i):
        c = principal_ellipse(i, near_round, 512)
        assert reshoot_defect(c, near_round, start=37) < 1e-6

    def test_refinement_invariance(self, near_round):
        Ls = [principal_ellipse(2, near_round, n).length for n in (64, 128, 256)]
        assert abs(Ls[1] - Ls[2]) < 1e-10

    def test_refuses_far_from_round(self):
        with pytest.raises(ValueError):
            principal_ellipse(1, EllipsoidParams(0.5, 1, 1.5))
