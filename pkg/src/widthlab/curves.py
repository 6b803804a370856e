"""Discretized curves, mod-2 one-cycles and integral 1-varifolds on the surface."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PolyCurve:
    """Ordered vertices on the surface, open or closed.

    ``seglen`` holds the arc length of each segment (n - 1 entries for an open
    curve, n for a closed one, the last closing the loop). It defaults to the
    chord lengths. ``tangents`` are optional unit tangents at the vertices.
    """

    vertices: np.ndarray
    closed: bool = False
    seglen: np.ndarray | None = None
    tangents: np.ndarray | None = None

    def __post_init__(self):
        v = _frozen(self.vertices)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError("vertices must have shape (n, 3)")
        nseg = len(v) if self.closed else len(v) - 1
        if nseg < 1 or (self.closed and len(v) < 3):
            raise ValueError("too few vertices")
        object.__setattr__(self, "vertices", v)
        if self.seglen is None:
            seg = self.chords()
        else:
            seg = np.asarray(self.seglen, dtype=float)
            if seg.shape != (nseg,):
                raise ValueError(f"seglen must have {nseg} entries")
        if np.any(seg <= 0):
            raise ValueError("consecutive vertices must be distinct")
        object.__setattr__(self, "seglen", _frozen(seg))
        if self.tangents is not None:
            t = _frozen(self.tangents)
            if t.shape != v.shape:
                raise ValueError("tangents must match vertices")
            object.__setattr__(self, "tangents", t)

    def chords(self) -> np.ndarray:
        v = self.vertices
        nxt = np.roll(v, -1, axis=0) if self.closed else v[1:]
        cur = v if self.closed else v[:-1]
        return np.linalg.norm(nxt - cur, axis=1)

    def chord_length(self) -> float:
        return float(self.chords().sum())

    @property
    def length(self) -> float:
        return float(self.seglen.sum())

    @property
    def cumulative(self) -> np.ndarray:
        """Arc length at each vertex (first vertex at 0)."""
        return np.concatenate([[0.0], np.cumsum(self.seglen)])[: len(self.vertices)]

    def segments(self):
        v = self.vertices
        if self.closed:
            return v, np.roll(v, -1, axis=0)
        return v[:-1], v[1:]

    def reversed(self) -> "PolyCurve":
        if self.closed:
            order = np.r_[0, np.arange(len(self.vertices) - 1, 0, -1)]
            seg = self.seglen[::-1]
        else:
            order = np.arange(len(self.vertices))[::-1]
            seg = self.seglen[::-1]
        tang = None if self.tangents is None else -self.tangents[order]
        return PolyCurve(self.vertices[order], self.closed, seg, tang)

    def max_step(self) -> float:
        return float(self.seglen.max())

    def residual(self, E) -> float:
        return float(np.abs(E.quadric(self.vertices)).max())


@dataclass(frozen=True, eq=False)
class Cycle1:
    """A mod-2 one-cycle: closed curves with implicit coefficient 1.

    ``source`` optionally records the function whose zero set the cycle is,
    so that Crofton counts can use the exact restricted function.
    """

    curves: tuple = ()
    source: Any = None
    flags: tuple = ()

    def __post_init__(self):
        curves = tuple(self.curves)
        if any(not c.closed for c in curves):
            raise ValueError("cycle members must be closed curves")
        object.__setattr__(self, "curves", curves)

    def __len__(self):
        return len(self.curves)

    @property
    def empty(self) -> bool:
        return not self.curves


@dataclass(frozen=True, eq=False)
class Varifold1:
    """Integral 1-varifold as curve pieces with positive integer multiplicities."""

    pieces: tuple = field(default_factory=tuple)

    def __post_init__(self):
        pieces = tuple((c, int(m)) for c, m in self.pieces)
        if any(m < 1 for _, m in pieces):
            raise ValueError("multiplicities must be positive integers")
        object.__setattr__(self, "pieces", pieces)

    @classmethod
    def from_cycle(cls, cycle: Cycle1, multiplicity: int = 1) -> "Varifold1":
        return cls(tuple((c, multiplicity) for c in cycle.curves))

    def __add__(self, other: "Varifold1") -> "Varifold1":
        return Varifold1(self.pieces + other.pieces)

    def max_step(self) -> float:
        return max(c.max_step() for c, _ in self.pieces)


def _weighted_pieces(c) -> Sequence[tuple[PolyCurve, int]]:
    if isinstance(c, Varifold1):
        return c.pieces
    if isinstance(c, Cycle1):
        return [(curve, 1) for curve in c.curves]
    if isinstance(c, PolyCurve):
        return [(c, 1)]
    return list(c)


def mass(c) -> float:
    """Multiplicity-weighted total arc length."""
    return float(sum(m * curve.length for curve, m in _weighted_pieces(c)))


def _vertex_distances(curve, center, r, E):
    from .surface import geodesic_distance, surface_distance

    d = surface_distance(E, center, curve.vertices)
    if not E.is_sphere and r >= 0.5:
        # corrected chords are too coarse at this size; shoot near the boundary
        for k in np.flatnonzero(np.abs(d - r) < 0.05):
            d[k] = geodesic_distance(E, center, curve.vertices[k])
    return d


def _curve_ball_mass(curve: PolyCurve, center, r, E, bisect_iters: int = 48) -> float:
    from .surface import geodesic_distance, project_to_surface, surface_distance

    a, b = curve.segments()
    dv = _vertex_distances(curve, center, r, E)
    da = dv if curve.closed else dv[:-1]
    db = np.roll(dv, -1) if curve.closed else dv[1:]
    ina, inb = da <= r, db <= r
    total = float(curve.seglen[ina & inb].sum())
    cross = np.flatnonzero(ina ^ inb)
    if cross.size:
        pa, pb = a[cross], b[cross]
        # bisection on the fraction along the chord, oriented from inside to outside
        flip = ~ina[cross]
        p_in = np.where(flip[:, None], pb, pa)
        p_out = np.where(flip[:, None], pa, pb)
        lo = np.zeros(cross.size)
        hi = np.ones(cross.size)
        for _ in range(bisect_iters):
            mid = 0.5 * (lo + hi)
            pts = project_to_surface(p_in + mid[:, None] * (p_out - p_in), E)
            inside = surface_distance(E, center, pts) <= r
            lo = np.where(inside, mid, lo)
            hi = np.where(inside, hi, mid)
        frac = 0.5 * (lo + hi)
        if not E.is_sphere and r >= 0.5:
            for j in range(cross.size):
                p = project_to_surface(p_in[j] + frac[j] * (p_out[j] - p_in[j]), E)
                err = geodesic_distance(E, center, p) - r
                rate = (surface_distance(E, center, p_out[j][None])[0]
                        - surface_distance(E, center, p_in[j][None])[0])
                if rate > 0:
                    frac[j] = np.clip(frac[j] - err / rate, 0.0, 1.0)
        total += float((frac * curve.seglen[cross]).sum())
    return total


def ball_mass(c, center, r: float, E=None) -> float:
    """Mass of the part of ``c`` within geodesic distance ``r`` of ``center``.

    Segments crossing the ball boundary are split by bisection; ``E`` defaults
    to the unit sphere.
    """
    from .surface import SPHERE, project_to_surface

    E = SPHERE if E is None else E
    if not 0 < r < np.pi / np.sqrt(min(E.a)) + 1e-12:
        raise ValueError("radius must lie in (0, pi)")
    center = project_to_surface(np.asarray(center, float), E)
    return float(sum(m * _curve_ball_mass(curve, center, r, E) for curve, m in _weighted_pieces(c)))


@dataclass(frozen=True)
class DensityEstimate:
    value: float
    scales: tuple
    ratios: tuple
    converged: bool

    def __float__(self):
        return self.value


def _extrapolate(scales, ratios, spread_tol):
    r = np.asarray(scales, float)
    q = np.asarray(ratios, float)
    order = np.argsort(r)
    r, q = r[order], q[order]
    if len(r) >= 2:
        r1, r2, q1, q2 = r[0], r[1], q[0], q[1]
        value = q1 - r1 * (q2 - q1) / (r2 - r1)
    else:
        value = q[0]
    spread = float(q.max() - q.min())
    return float(value), spread <= spread_tol


def default_scales(r_max: float, r_min: float, count: int = 4) -> list[float]:
    if r_min >= r_max:
        raise ValueError("smallest admissible scale exceeds the largest")
    return list(np.geomspace(r_max, r_min, count))


def varifold_density(V, p, scales: Iterable[float] | None = None, E=None,
                     spread_tol: float = 0.05) -> DensityEstimate:
    """Density of ``V`` at ``p``: ball mass over 2r, extrapolated linearly to r = 0.

    The two smallest scales drive the extrapolation. Estimates whose ratios
    spread by more than ``spread_tol`` across scales are flagged
    non-converged.
    """
    pieces = _weighted_pieces(V)
    h = max(curve.max_step() for curve, _ in pieces)
    if scales is None:
        scales = default_scales(0.2, max(5 * h, 0.01))
    scales = sorted((float(s) for s in scales), reverse=True)
    if scales[-1] < 5 * h * (1 - 1e-9):
        raise ValueError("smallest scale must be at least 5x the discretization step")
    ratios = [ball_mass(pieces, p, r, E) / (2 * r) for r in scales]
    value, ok = _extrapolate(scales, ratios, spread_tol)
    return DensityEstimate(value, tuple(scales), tuple(ratios), ok)


def great_circle(normal, n: int = 512, start=None) -> PolyCurve:
    """Unit great circle orthogonal to ``normal`` with exact arc lengths and tangents."""
    nrm = np.asarray(normal, float)
    nrm = nrm / np.linalg.norm(nrm)
    if start is None:
        trial = np.eye(3)[np.argmin(np.abs(nrm))]
        e1 = trial - (trial @ nrm) * nrm
    else:
        e1 = np.asarray(start, float) - (np.asarray(start, float) @ nrm) * nrm
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(nrm, e1)
    t = 2 * np.pi * np.arange(n) / n
    verts = np.cos(t)[:, None] * e1 + np.sin(t)[:, None] * e2
    tang = -np.sin(t)[:, None] * e1 + np.cos(t)[:, None] * e2
    return PolyCurve(verts, closed=True, seglen=np.full(n, 2 * np.pi / n), tangents=tang)


def great_arc(p, q, n: int = 256) -> PolyCurve:
    """Open minimizing great-circle arc from unit vector ``p`` to ``q`` (not antipodal)."""
    p = np.asarray(p, float) / np.linalg.norm(p)
    q = np.asarray(q, float) / np.linalg.norm(q)
    ang = np.arccos(np.clip(p @ q, -1, 1))
    u = q - (p @ q) * p
    u /= np.linalg.norm(u)
    return meridian_arc(p, u, ang, n)


def meridian_arc(p, direction, length: float, n: int = 256) -> PolyCurve:
    """Open great-circle arc of given length from ``p`` leaving in ``direction``."""
    p = np.asarray(p, float)
    u = np.asarray(direction, float)
    u = u - (u @ p) * p
    u /= np.linalg.norm(u)
    t = length * np.arange(n + 1) / n
    verts = np.cos(t)[:, None] * p + np.sin(t)[:, None] * u
    tang = -np.sin(t)[:, None] * p + np.cos(t)[:, None] * u
    return PolyCurve(verts, closed=False, seglen=np.full(n, length / n), tangents=tang)


def latitude_circle(height: float, n: int = 512) -> PolyCurve:
    """Small circle {x3 = height} on the unit sphere (chord lengths)."""
    rho = np.sqrt(1 - height**2)
    t = 2 * np.pi * np.arange(n) / n
    verts = np.stack([rho * np.cos(t), rho * np.sin(t), np.full(n, height)], axis=1)
    seg = np.full(n, 2 * np.pi * rho / n)
    return PolyCurve(verts, closed=True, seglen=seg)
