import numpy as np
import pytest

from widthlab.curves import PolyCurve
from widthlab.spectral import (CANDIDATES, ClosedGeodesic, candidate_table,
                               closed_geodesic_search, default_zero_tol, index_form,
                               index_nullity, principal_geodesic)
from widthlab.surface import SPHERE, EllipsoidParams

from conftest import NEAR_ROUND

OTHER = EllipsoidParams(1.08, 0.97, 0.92)


class TestIndexForm:
    def test_great_circle(self):
        res = index_nullity(principal_geodesic(3, SPHERE))
        assert (res.index, res.nullity) == (1, 2)
        assert not res.ambiguous

    @pytest.mark.parametrize("i,r,expected", [(1, 1, (1, 0)), (2, 1, (2, 0)), (3, 1, (3, 0)),
                                              (1, 2, (3, 0)), (2, 2, (4, 0)), (3, 2, (5, 0))])
    def test_principal_geodesics(self, near_round, i, r, expected):
        res = index_nullity(principal_geodesic(i, near_round, covering=r))
        assert (res.index, res.nullity) == expected
        assert not res.ambiguous

    @pytest.mark.parametrize("i,r", [(2, 1), (1, 2)])
    def test_grid_refinement(self, near_round, i, r):
        g = principal_geodesic(i, near_round, covering=r)
        coarse, fine = index_nullity(g, 256 * r), index_nullity(g, 512 * r)
        assert (coarse.index, coarse.nullity) == (fine.index, fine.nullity)

    @pytest.mark.parametrize("shift", [1, 100, 517])
    def test_start_vertex(self, near_round, shift):
        g = principal_geodesic(2, near_round)
        v = np.roll(g.curve.vertices, shift, axis=0)
        rolled = ClosedGeodesic(PolyCurve(v, closed=True), near_round, 1, "gamma2")
        a, b = index_nullity(g), index_nullity(rolled)
        assert (a.index, a.nullity) == (b.index, b.nullity)

    def test_constant_field(self):
        Q = index_form(principal_geodesic(1, SPHERE), 512)
        assert Q.value(np.ones(512)) == pytest.approx(-2 * np.pi, abs=1e-4)

    def test_operator_matches_form(self, near_round, rng):
        Q = index_form(principal_geodesic(2, near_round), 256)
        f = rng.standard_normal(256)
        assert Q.h * f @ Q.operator() @ f == pytest.approx(Q.value(f), rel=1e-10)

    @pytest.mark.parametrize("E", [NEAR_ROUND, OTHER], ids=["near_round", "other"])
    @pytest.mark.parametrize("i", [1, 2, 3])
    def test_covering_increment(self, E, i):
        base = index_nullity(principal_geodesic(i, E)).index
        for r in (2, 3):
            assert index_nullity(principal_geodesic(i, E, covering=r)).index - base == 2 * (r - 1)

    def test_grid_too_coarse(self, near_round):
        with pytest.raises(ValueError):
            index_nullity(principal_geodesic(1, near_round, covering=2), 300)

    def test_ambiguous_band(self):
        g = principal_geodesic(1, SPHERE)
        assert index_nullity(g).ambiguous is False
        lam = np.array(index_nullity(g).eigenvalues)
        tol = 0.6 * np.abs(lam[0])  # lam_0 = -1 falls in (tol, 2 tol]
        assert index_nullity(g, zero_tol=tol).ambiguous

    def test_zero_tol_default(self):
        assert default_zero_tol(256) == pytest.approx(10 * (2 * np.pi / 256) ** 2)


class TestCandidates:
    def test_sphere_masses(self):
        T = candidate_table(SPHERE)
        for label, parts in CANDIDATES.items():
            assert T.mass(label) == pytest.approx(2 * np.pi * sum(r for _, r in parts), rel=1e-6)

    def test_near_round_order(self, near_round):
        T = candidate_table(near_round)
        assert T.flags["W1<W2<W3"] and T.flags["W4<W5<W6"] and T.flags["W5=(W4+W6)/2"]
        assert T.flags["W6_vs_W7"] in {"W6<W7", "W7<W6"}
        assert np.sign(T.flags["W6-W7"]) == (1 if T.flags["W6_vs_W7"] == "W7<W6" else -1)

    def test_index_columns(self, near_round):
        T = candidate_table(near_round)
        assert [T.row(f"W{k}").index for k in (1, 2, 3, 4, 6, 9)] == [1, 2, 3, 3, 4, 5]
        assert T.row("W5").index_source == "additive (assumed)"
        assert T.row("W5").index == 3

    def test_rejects_far_surface(self):
        with pytest.raises(ValueError):
            candidate_table(EllipsoidParams(0.5, 1.0, 1.5))


@pytest.mark.slow
class TestSearch:
    def test_three_classes(self, near_round):
        rep = closed_geodesic_search(near_round, 2.5 * np.pi)
        labels = sorted(g.label for g in rep.classes)
        assert labels == ["gamma1", "gamma2", "gamma3"]
        L = sorted(g.prime_length for g in rep.classes)
        ref = sorted(principal_geodesic(i, near_round).prime_length for i in (1, 2, 3))
        assert np.allclose(L, ref, rtol=1e-4)

    def test_sphere_one_class(self):
        rep = closed_geodesic_search(SPHERE, 2.5 * np.pi)
        assert len(rep.classes) == 1
        assert rep.classes[0].prime_length == pytest.approx(2 * np.pi, rel=1e-4)

    def test_double_covers(self, near_round):
        rep = closed_geodesic_search(near_round, 4.6 * np.pi)
        assert len(rep.classes) == 3
        assert sorted(g.covering for g in rep.geodesics) == [1, 1, 1, 2, 2, 2]
