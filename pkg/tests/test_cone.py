import numpy as np
import pytest

from widthlab import fixtures
from widthlab.cone import (BumpField, RotationField, build_cone, cone_density,
                           cone_dilation_check, cone_mass_growth, first_variation,
                           flowed_mass_change, gradient_check, random_bump_field)
from widthlab.curves import Varifold1, great_circle, latitude_circle, mass

class SphereTangent:
    """Y(x) = B(x) - (B(x).x) x: the part of a field tangent to the unit sphere."""

    def __init__(self, base):
        self.base = base

    def __call__(self, x):
        b = self.base(x)
        return b - (b * x).sum(1, keepdims=True) * x

    def jacobian(self, x):
        b, D = self.base(x), self.base.jacobian(x)
        grad = np.einsum("nkj,nk->nj", D, x) + b
        return (D - x[:, :, None] * grad[:, None, :]
                - (b * x).sum(1)[:, None, None] * np.eye(3))


DISK = Varifold1(((great_circle([0, 0, 1], 720), 1),))
TWO = Varifold1(((great_circle([0, 0, 1], 720), 1), (great_circle([1, 0, 0], 720), 1)))
Y = Varifold1(fixtures.y_network(256).pieces)


def skewed_y(a_deg=2 * np.degrees(np.arcsin(0.025))):
    """Y-network whose junction residual is 0.05."""
    N = fixtures.y_network(256, longitudes=(0.0, 120.0 + a_deg, 240.0 + a_deg))
    return Varifold1(N.pieces)


class TestBuild:
    @pytest.mark.parametrize("V,area", [(DISK, np.pi), (TWO, 2 * np.pi)])
    def test_planar_areas(self, V, area):
        assert build_cone(V, 2.0).mass() == pytest.approx(4 * area, rel=1e-2)

    @pytest.mark.parametrize("V", [DISK, TWO, Y])
    def test_mass_is_half_r_squared_times_base(self, V):
        C = build_cone(V, 3.0)
        assert C.mass() == pytest.approx(4.5 * mass(V), rel=1e-2)

    def test_support_on_rays(self):
        C = build_cone(Y, 1.0)
        assert np.all(C.triangles[:, 0] == 0)
        base = np.concatenate([c.vertices for c, _ in Y.pieces])
        far = C.triangles[:, 1:].reshape(-1, 3)
        d = np.abs(far @ base.T - 1).min(axis=1)
        assert d.max() < 1e-12

    def test_y_cone_is_three_half_planes(self):
        C = build_cone(Y, 1.0)
        n = C.normals
        n = n * np.sign(n[np.arange(len(n)), np.argmax(np.abs(n), axis=1)])[:, None]
        assert len({tuple(v) for v in np.round(n, 9)}) == 3

    def test_empty_base_rejected(self):
        with pytest.raises(ValueError):
            build_cone(Varifold1(()), 1.0)


class TestDilation:
    @pytest.mark.parametrize("V,lam", [(DISK, 2.0), (DISK, 1.0), (Y, 1.37), (TWO, 0.6)])
    def test_invariance(self, V, lam):
        assert cone_dilation_check(build_cone(V, 1.0), lam) < 1e-3

    def test_identity_is_exact(self):
        assert cone_dilation_check(build_cone(Y, 1.0), 1.0) == 0.0

    def test_range(self):
        with pytest.raises(ValueError):
            cone_dilation_check(build_cone(DISK, 1.0), 3.0)


class TestDensity:
    def test_disk(self):
        assert cone_density(build_cone(DISK, 1.0), [0.3, 0.2, 0]).value == pytest.approx(1, abs=0.03)

    def test_crossing_ray(self):
        assert cone_density(build_cone(TWO, 1.0), [0, 0.5, 0]).value == pytest.approx(2, abs=0.06)

    def test_triple_ray(self):
        assert cone_density(build_cone(Y, 1.0), [0, 0, 0.5]).value == pytest.approx(1.5, abs=0.05)

    def test_constant_along_rays(self):
        C = build_cone(Y, 2.0)
        y = np.array([0.0, 0.0, 0.4])
        assert cone_density(C, y).value == pytest.approx(cone_density(C, 2 * y).value, rel=0.03)

    def test_band(self):
        with pytest.raises(ValueError):
            cone_density(build_cone(DISK, 1.0), [0.05, 0, 0])


class TestMassGrowth:
    @pytest.mark.parametrize("V,expected", [(DISK, 2 * np.pi), (TWO, 4 * np.pi), (Y, 3 * np.pi)])
    def test_recovers_base_mass(self, V, expected):
        C = build_cone(V, 10.0)
        y = np.array([0.3, 0.2, 0.1]) / np.linalg.norm([0.3, 0.2, 0.1]) * 0.5
        assert cone_mass_growth(C, y) == pytest.approx(expected, rel=0.05)

    def test_extent_too_small(self):
        with pytest.raises(ValueError):
            cone_mass_growth(build_cone(DISK, 1.0), [0.3, 0, 0])


class TestFirstVariation:
    def test_rotation_of_disk(self):
        X = RotationField((0, 0, 1.0))
        assert abs(first_variation(build_cone(DISK, 1.0), X)) < 1e-8

    def test_stationary_y_cone(self):
        C = build_cone(Y, 1.0)
        rng = np.random.default_rng(3)
        for _ in range(5):
            X = random_bump_field(rng, C)
            assert abs(first_variation(C, X)) <= 1e-3 * X.sup_norm()

    def test_defect_is_detected(self):
        C = build_cone(skewed_y(), 1.0)
        N = fixtures.y_network(256, longitudes=(0.0, 120.0 + 2 * np.degrees(np.arcsin(0.025)),
                                                 240.0 + 2 * np.degrees(np.arcsin(0.025))))
        from widthlab.network import stationarity_residual
        defect = sum(b.weighted for b in N.junctions[0].incident)
        assert stationarity_residual(N.junctions[0]) == pytest.approx(0.05, rel=1e-6)
        X = BumpField((0, 0, 0.5), 0.3, tuple(defect / np.linalg.norm(defect)))
        delta = first_variation(C, X)
        assert abs(delta) >= 0.01 * X.sup_norm()
        fd = flowed_mass_change(C, X, 1e-3) / 1e-3
        assert np.sign(fd) == np.sign(delta)

    def test_curve_first_variation_of_great_circle(self):
        B = BumpField((1.0, 0, 0), 0.5, (0.3, 0.2, -0.4), ((0.1, 0, 0), (0, 0.2, 0), (0, 0, 0)))
        assert abs(first_variation(DISK, SphereTangent(B))) < 1e-5
        assert abs(first_variation(Varifold1(((latitude_circle(0.5, 720), 1),)),
                                   SphereTangent(BumpField((0, 0.8, 0.5), 0.5, (0, 0, 1.0))))) > 0.05

    def test_gradient_ratio(self):
        C = build_cone(Y, 1.0)
        X = random_bump_field(np.random.default_rng(7), C)
        g = gradient_check(C, X)
        assert 8 <= g.ratio <= 12
