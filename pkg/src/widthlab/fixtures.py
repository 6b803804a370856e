"""Reference networks and hand-labeled junctions used by tests, scripts and the CLI."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import PolyCurve, great_circle, meridian_arc
from .network import GeodesicNetwork, Incidence, Junction, junction_in_plane, network_junction
from .surface import SPHERE, EllipsoidParams, principal_ellipse, project_to_surface

NORTH = np.array([0.0, 0.0, 1.0])
SOUTH = -NORTH


def _longitude(deg: float) -> np.ndarray:
    t = np.radians(deg)
    return np.array([np.cos(t), np.sin(t), 0.0])


def y_network(n: int = 256, longitudes=(0.0, 120.0, 240.0)) -> GeodesicNetwork:
    """Three half-meridians joining the poles, meeting at 120 degrees at both ends."""
    pieces = tuple((meridian_arc(NORTH, _longitude(lon), np.pi, n), 1) for lon in longitudes)
    ids = range(len(pieces))
    junctions = (network_junction(pieces, NORTH, ids), network_junction(pieces, SOUTH, ids))
    return GeodesicNetwork(pieces, junctions, SPHERE)


def wavy_meridian(longitude: float, amplitude: float = 0.2, n: int = 256) -> PolyCurve:
    """Pole-to-pole arc whose longitude oscillates; not a geodesic."""
    t = np.linspace(0.0, np.pi, n + 1)
    lon = np.radians(longitude) + amplitude * np.sin(t) ** 2 * np.sin(3 * t)
    v = np.stack([np.sin(t) * np.cos(lon), np.sin(t) * np.sin(lon), np.cos(t)], axis=1)
    v[0], v[-1] = NORTH, SOUTH
    return PolyCurve(v)


def broken_y_network(n: int = 256) -> GeodesicNetwork:
    """Y-network with the last meridian replaced by a wavy arc."""
    good = y_network(n)
    pieces = good.pieces[:2] + ((wavy_meridian(240.0, n=n), 1),)
    junctions = (network_junction(pieces, NORTH, range(3)), network_junction(pieces, SOUTH, range(3)))
    return GeodesicNetwork(pieces, junctions, SPHERE)


def crossing_circles(normals, multiplicities=None, n: int = 720) -> GeodesicNetwork:
    """Great circles on the unit sphere with junctions at all pairwise crossings."""
    normals = [np.asarray(v, float) / np.linalg.norm(v) for v in normals]
    mults = [1] * len(normals) if multiplicities is None else list(multiplicities)
    points = []
    for i in range(len(normals)):
        for k in range(i + 1, len(normals)):
            c = np.cross(normals[i], normals[k])
            c /= np.linalg.norm(c)
            for p in (c, -c):
                if not any(np.linalg.norm(p - q) < 1e-9 for q in points):
                    points.append(p)
    pieces = []
    for nrm, m in zip(normals, mults):
        # start each circle at a crossing point so that all crossings are vertices
        pieces.append((great_circle(nrm, n, start=points[0] if _on(points[0], nrm) else None), m))
    pieces = tuple(pieces)
    junctions = []
    for p in points:
        through = [s for s, nrm in enumerate(normals) if _on(p, nrm)]
        if len(through) >= 2:
            junctions.append(network_junction(pieces, p, through))
    return GeodesicNetwork(pieces, tuple(junctions), SPHERE)


def _on(p, normal) -> bool:
    return abs(float(np.asarray(p) @ normal)) < 1e-9


def crossing_ellipses(E: EllipsoidParams, n: int = 512) -> GeodesicNetwork:
    """Principal ellipses in the planes x1 = 0 and x2 = 0, crossing on the x3 axis."""
    g1, g2 = principal_ellipse(1, E, n), principal_ellipse(2, E, n)
    pieces = ((g1, 1), (g2, 1))
    top = project_to_surface(np.array([0.0, 0.0, 1.0]), E)
    junctions = (network_junction(pieces, top, (0, 1), E), network_junction(pieces, -top, (0, 1), E))
    return GeodesicNetwork(pieces, junctions, E)


@dataclass(frozen=True)
class JunctionCase:
    name: str
    junction: Junction
    expected_class: str
    integer_density: bool
    balanced: bool


def junction_cases() -> list[JunctionCase]:
    """Twelve labeled junctions at the north pole of the unit sphere."""
    def J(angles, mults=None):
        return junction_in_plane(NORTH, angles, mults)

    # 4 e1 + 4 e2 - e1 + 5 (-0.6, -0.8) = 0, with no opposite pair
    e1, e2 = np.array([1.0, 0, 0]), np.array([0, 1.0, 0])
    skew = Junction(NORTH, (
        Incidence(0, e1, 4), Incidence(1, e2, 4), Incidence(2, -e1, 1),
        Incidence(3, -0.6 * e1 - 0.8 * e2, 5),
    ))
    return [
        JunctionCase("two crossing great circles", J([0, 90, 180, 270]), "regular", True, True),
        JunctionCase("120-degree triple", J([0, 120, 240]), "triple", False, True),
        JunctionCase("weighted 4-valent balance", skew, "singular", True, True),
        JunctionCase("doubled circle crossing a circle", J([0, 90, 180, 270], [2, 1, 2, 1]), "regular", True, True),
        JunctionCase("three great circles", J([0, 60, 120, 180, 240, 300]), "regular", True, True),
        JunctionCase("unbalanced triple 0/115/240", J([0, 115, 240]), "triple", False, False),
        JunctionCase("lopsided triple 0/90/180", J([0, 90, 180]), "triple", False, False),
        JunctionCase("circles crossing at 60 degrees", J([0, 60, 180, 240]), "regular", True, True),
        JunctionCase("five-fold star", J([0, 72, 144, 216, 288]), "singular", False, True),
        JunctionCase("triple of multiplicity 2", J([0, 120, 240], [2, 2, 2]), "singular", True, True),
        JunctionCase("through segment of multiplicity 2 with a spur pair",
                     J([0, 180, 90, 270], [2, 2, 3, 3]), "regular", True, True),
        JunctionCase("unbalanced 4-valent", J([0, 90, 180, 200]), "singular", True, False),
    ]
