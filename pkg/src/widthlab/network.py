"""Geodesic networks: junction balance, classification and densities.

A junction lists its incident half-branches as (segment id, outgoing unit
tangent, multiplicity). A segment passing smoothly through a junction is
listed twice, with opposite tangents and equal multiplicity, so that the
density at every junction is half the weighted number of half-branches.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curves import PolyCurve, mass
from .surface import SPHERE, EllipsoidParams, estimate_tangent, reshoot_defect

PAIR_TOL = 1e-9
DENSITY_TOL = 1e-9
RESIDUAL_TOL = 1e-6
GEODESIC_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class Incidence:
    segment: int
    tangent: np.ndarray
    multiplicity: int = 1

    def __post_init__(self):
        t = np.array(self.tangent, dtype=float)
        t.setflags(write=False)
        object.__setattr__(self, "tangent", t)
        if int(self.multiplicity) != self.multiplicity or self.multiplicity < 1:
            raise ValueError("multiplicity must be a positive integer")

    @property
    def weighted(self) -> np.ndarray:
        return self.multiplicity * self.tangent


@dataclass(frozen=True, eq=False)
class Junction:
    point: np.ndarray
    incident: tuple
    surface: EllipsoidParams = SPHERE

    def __post_init__(self):
        p = np.array(self.point, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "point", p)
        inc = tuple(self.incident)
        object.__setattr__(self, "incident", inc)
        if len(inc) < 3:
            raise ValueError("a junction needs at least three incident half-branches")
        if abs(float(self.surface.quadric(p))) > 1e-8:
            raise ValueError("junction point is not on the surface")
        nrm = self.surface.normal(p)
        for b in inc:
            if abs(np.linalg.norm(b.tangent) - 1) > 1e-9:
                raise ValueError(f"tangent of segment {b.segment} is not a unit vector")
            if abs(b.tangent @ nrm) > 1e-9:
                raise ValueError(f"tangent of segment {b.segment} is not tangent to the surface")

    @property
    def valence(self) -> int:
        return len(self.incident)

    @property
    def density(self) -> float:
        return sum(b.multiplicity for b in self.incident) / 2


def junction_in_plane(point, angles_deg, multiplicities=None, segments=None,
                      surface: EllipsoidParams = SPHERE) -> Junction:
    """Junction at ``point`` with tangents at the given angles in its tangent plane."""
    p = np.asarray(point, float)
    n = surface.normal(p)
    trial = np.eye(3)[np.argmin(np.abs(n))]
    e1 = trial - (trial @ n) * n
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    ang = np.radians(np.asarray(angles_deg, float))
    mult = [1] * len(ang) if multiplicities is None else list(multiplicities)
    ids = list(range(len(ang))) if segments is None else list(segments)
    inc = tuple(Incidence(s, np.cos(t) * e1 + np.sin(t) * e2, m) for s, t, m in zip(ids, ang, mult))
    return Junction(p, inc, surface)


def stationarity_residual(j: Junction) -> float:
    """|sum of multiplicity-weighted outgoing tangents|; zero at a balanced junction."""
    return float(np.linalg.norm(sum(b.weighted for b in j.incident)))


def opposite_pairing(j: Junction, tol: float = PAIR_TOL):
    """Greedy matching of weighted tangents into exactly opposite pairs.

    Half-branches are visited in order of segment id (then listing order);
    each is paired with the lowest-id unmatched partner cancelling it within
    ``tol``. Returns the list of pairs, or None when some branch is left over.
    """
    order = sorted(range(j.valence), key=lambda i: (j.incident[i].segment, i))
    w = [j.incident[i].weighted for i in range(j.valence)]
    free = list(order)
    pairs = []
    while free:
        i = free.pop(0)
        partner = next((k for k in free if np.linalg.norm(w[i] + w[k]) <= tol), None)
        if partner is None:
            return None
        free.remove(partner)
        pairs.append((i, partner))
    return pairs


def classify_junction(j: Junction, tol: float = PAIR_TOL) -> str:
    """'triple', 'regular' or 'singular'."""
    if j.valence == 3 and all(b.multiplicity == 1 for b in j.incident):
        return "triple"
    return "regular" if opposite_pairing(j, tol) is not None else "singular"


def is_integer_density(density: float, tol: float = DENSITY_TOL) -> bool:
    return density >= 1 - tol and abs(density - round(density)) <= tol


@dataclass(frozen=True, eq=False)
class GeodesicNetwork:
    pieces: tuple  # (PolyCurve, multiplicity); segment id = position
    junctions: tuple = ()
    surface: EllipsoidParams = SPHERE

    def __post_init__(self):
        pieces = tuple((c, int(m)) for c, m in self.pieces)
        if any(m < 1 for _, m in pieces):
            raise ValueError("multiplicities must be positive integers")
        object.__setattr__(self, "pieces", pieces)
        object.__setattr__(self, "junctions", tuple(self.junctions))

    @property
    def mass(self) -> float:
        return mass(self.pieces)

    def validate(self, tol: float = 1e-8) -> list[str]:
        """Structural problems: dangling endpoints, unknown ids, mismatched multiplicities."""
        problems = []
        n = len(self.pieces)
        for ji, j in enumerate(self.junctions):
            for b in j.incident:
                if not 0 <= b.segment < n:
                    problems.append(f"junction {ji}: unknown segment {b.segment}")
                elif b.multiplicity != self.pieces[b.segment][1]:
                    problems.append(f"junction {ji}: multiplicity of segment {b.segment} differs")
        points = [j.point for j in self.junctions]
        for sid, (c, _) in enumerate(self.pieces):
            if c.closed:
                continue
            for end in (c.vertices[0], c.vertices[-1]):
                if not any(np.linalg.norm(end - p) <= tol for p in points):
                    problems.append(f"segment {sid}: endpoint {np.round(end, 6)} is in no junction")
        return problems


def incidence_at(N_pieces, segment: int, point, tol: float = 1e-8) -> list[Incidence]:
    """Half-branches of a segment at ``point``: one at an endpoint, two at an interior vertex."""
    curve, mult = N_pieces[segment]
    d = np.linalg.norm(curve.vertices - np.asarray(point, float), axis=1)
    k = int(np.argmin(d))
    if d[k] > tol:
        raise ValueError(f"segment {segment} does not pass through the point")
    last = len(curve.vertices) - 1
    if not curve.closed and k == 0:
        return [Incidence(segment, estimate_tangent(curve, 0), mult)]
    if not curve.closed and k == last:
        return [Incidence(segment, estimate_tangent(curve, last, -1), mult)]
    t = estimate_tangent(curve, k)
    return [Incidence(segment, t, mult), Incidence(segment, -t, mult)]


def network_junction(pieces, point, segments, surface: EllipsoidParams = SPHERE) -> Junction:
    """Junction at ``point`` assembled from the tangents of the listed segments."""
    inc = []
    for s in segments:
        inc.extend(incidence_at(pieces, s, point))
    return Junction(np.asarray(point, float), tuple(inc), surface)


@dataclass(frozen=True)
class StationarityReport:
    stationary: bool
    junction_residuals: tuple
    bad_junctions: tuple  # (junction index, residual)
    segment_defects: tuple
    bad_segments: tuple  # (segment id, re-shooting defect)
    problems: tuple = field(default_factory=tuple)

    def __bool__(self):
        return self.stationary


def network_is_stationary(N: GeodesicNetwork, tol: float = RESIDUAL_TOL,
                          geodesic_tol: float = GEODESIC_TOL) -> StationarityReport:
    """All junctions balanced within ``tol`` and all segments geodesic."""
    res = tuple(stationarity_residual(j) for j in N.junctions)
    bad_j = tuple((i, r) for i, r in enumerate(res) if r > tol)
    defects = tuple(reshoot_defect(c, N.surface) for c, _ in N.pieces)
    bad_s = tuple((i, d) for i, d in enumerate(defects) if d > geodesic_tol)
    problems = tuple(N.validate())
    ok = not (bad_j or bad_s or problems)
    return StationarityReport(ok, res, bad_j, defects, bad_s, problems)


def integer_density_filter(N: GeodesicNetwork, tol: float = DENSITY_TOL):
    """(passes, violating junction indices): densities must be positive integers."""
    bad = [i for i, j in enumerate(N.junctions) if not is_integer_density(j.density, tol)]
    return not bad, bad


def max_density(N: GeodesicNetwork) -> float:
    """Largest density over junctions and interior points of the pieces."""
    interior = max((m for _, m in N.pieces), default=0)
    return float(max([interior] + [j.density for j in N.junctions]))


def density_bound_check(N: GeodesicNetwork, d: int) -> bool:
    """On the round sphere, mass < 2 pi d must force every density below d.

    Returns False only if the implication fails, which would indicate an
    inconsistent network. Other surfaces are refused.
    """
    if not N.surface.is_unit_sphere:
        raise ValueError("the density bound is only certified on the round unit sphere")
    if d < 1 or int(d) != d:
        raise ValueError("d must be a positive integer")
    if N.mass >= 2 * np.pi * d:
        return True
    return max_density(N) < d
