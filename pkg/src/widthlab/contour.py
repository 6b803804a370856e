"""Zero sets of functions on the surface by marching triangles on a geodesic icosphere."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .curves import PolyCurve
from .surface import EllipsoidParams, SPHERE, radial_to_surface

ZERO_TOL = 1e-12
ZERO_OFFSET = -1e-10


@dataclass(frozen=True, eq=False)
class Icosphere:
    vertices: np.ndarray  # unit sphere
    faces: np.ndarray  # (F, 3) vertex ids
    edges: np.ndarray  # (E, 2) vertex ids, sorted
    face_edges: np.ndarray  # (F, 3) edge ids, edge k opposite... joins face vertex k and k+1
    level: int

    @property
    def spacing(self) -> float:
        e = self.vertices[self.edges]
        return float(np.linalg.norm(e[:, 0] - e[:, 1], axis=1).mean())


def _icosahedron():
    phi = (1 + 5**0.5) / 2
    v = np.array([
        [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
        [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
        [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
    ], dtype=float)
    f = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ])
    return v / np.linalg.norm(v, axis=1, keepdims=True), f


def _edges(faces):
    pairs = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    pairs.sort(axis=1)
    edges, inverse = np.unique(pairs, axis=0, return_inverse=True)
    nf = len(faces)
    face_edges = inverse.reshape(3, nf).T
    return edges, face_edges


@lru_cache(maxsize=8)
def icosphere(level: int) -> Icosphere:
    """Geodesic icosphere with ``level`` rounds of 4-to-1 subdivision."""
    if level < 0:
        raise ValueError("level must be nonnegative")
    v, f = _icosahedron()
    for _ in range(level):
        edges, face_edges = _edges(f)
        mids = v[edges].sum(axis=1)
        mids /= np.linalg.norm(mids, axis=1, keepdims=True)
        m = len(v) + face_edges  # midpoint ids: (v0v1, v1v2, v2v0)
        v = np.concatenate([v, mids])
        a, b, c = f[:, 0], f[:, 1], f[:, 2]
        ab, bc, ca = m[:, 0], m[:, 1], m[:, 2]
        f = np.concatenate([
            np.stack([a, ab, ca], 1), np.stack([ab, b, bc], 1),
            np.stack([ca, bc, c], 1), np.stack([ab, bc, ca], 1),
        ])
    edges, face_edges = _edges(f)
    for arr in (v, f, edges, face_edges):
        arr.setflags(write=False)
    return Icosphere(v, f, edges, face_edges, level)


@dataclass(frozen=True, eq=False)
class ContourResult:
    points: np.ndarray  # zero point on each crossing edge (K, 3), on the surface
    edge_ids: np.ndarray  # (K,) global edge ids of crossing edges
    segments: np.ndarray  # (S, 2) indices into points, one per crossing face
    perturbed: bool
    near_degenerate: bool
    folds: int = 0  # segments joining two different branches of the zero set

    @property
    def resolved(self) -> bool:
        return self.folds == 0

    def mass(self) -> float:
        if not len(self.segments):
            return 0.0
        p = self.points[self.segments]
        return float(np.linalg.norm(p[:, 0] - p[:, 1], axis=1).sum())


def _edge_roots(func, a, b, fa, fb, E, iters):
    # Illinois false position along the great arc a->b, mapped onto E
    lo, hi = np.zeros(len(a)), np.ones(len(a))
    flo, fhi = fa.copy(), fb.copy()
    side = np.zeros(len(a), dtype=int)

    def point(t):
        p = (1 - t)[:, None] * a + t[:, None] * b
        return radial_to_surface(p, E)

    for _ in range(iters):
        t = (lo * fhi - hi * flo) / (fhi - flo)
        ft = func(point(t))
        left = np.sign(ft) == np.sign(flo)
        fhi = np.where(left & (side == -1), 0.5 * fhi, fhi)
        flo = np.where(~left & (side == 1), 0.5 * flo, flo)
        lo, flo = np.where(left, t, lo), np.where(left, ft, flo)
        hi, fhi = np.where(left, hi, t), np.where(left, fhi, ft)
        side = np.where(left, -1, 1)
    t = (lo * fhi - hi * flo) / (fhi - flo)
    return point(np.clip(t, 0.0, 1.0))


@lru_cache(maxsize=16)
def surface_vertices(level: int, E: EllipsoidParams = SPHERE) -> np.ndarray:
    """Icosphere vertices mapped radially onto E."""
    v = radial_to_surface(icosphere(level).vertices, E)
    v.setflags(write=False)
    return v


def surface_gradient(func, x: np.ndarray, E: EllipsoidParams = SPHERE,
                     h: float = 1e-6) -> np.ndarray:
    """Tangential part of the ambient gradient of ``func`` by central differences."""
    g = np.stack([(func(x + h * e) - func(x - h * e)) / (2 * h) for e in np.eye(3)], axis=1)
    n = E.normal(x)
    return g - (g * n).sum(axis=1, keepdims=True) * n


def count_folds(func, points: np.ndarray, segments: np.ndarray, E: EllipsoidParams = SPHERE) -> int:
    """Segments whose endpoint gradients point in opposite directions.

    On a resolved contour both ends of a segment lie on one branch and the
    gradients nearly agree. Where two branches come closer than the grid
    spacing, segments jump across the gap and the traced length is inflated.
    """
    if not len(segments):
        return 0
    g = surface_gradient(func, points, E)
    return int(((g[segments[:, 0]] * g[segments[:, 1]]).sum(axis=1) < 0).sum())


def contour(func, level: int = 6, E: EllipsoidParams = SPHERE, refine: int = 4,
            grid_values: np.ndarray | None = None) -> ContourResult:
    """Marching-triangles zero set of ``func`` (vectorized over (n, 3) points) on E.

    Grid values within ZERO_TOL of zero are shifted to ZERO_OFFSET (so they
    count as part of {f <= 0}) and the result is flagged ``perturbed``.
    Crossing points are refined along each edge by false position.
    ``grid_values`` may supply func at the (mapped) grid vertices. ``func``
    must accept points near the surface, off it, for the fold count.
    """
    ico = icosphere(level)
    if grid_values is None:
        f = np.asarray(func(surface_vertices(level, E)), dtype=float)
    else:
        f = np.asarray(grid_values, dtype=float)
    scale = float(np.abs(f).max()) if f.size else 0.0
    zero = np.abs(f) <= ZERO_TOL
    perturbed = bool(zero.any())
    if perturbed:
        f = np.where(zero, ZERO_OFFSET, f)
    neg = f < 0
    nneg = neg[ico.faces].sum(axis=1)
    cross_faces = np.flatnonzero((nneg == 1) | (nneg == 2))
    fe = ico.face_edges[cross_faces]
    ends = ico.edges[fe]  # (S, 3, 2)
    edge_cross = neg[ends[..., 0]] != neg[ends[..., 1]]
    seg_edges = fe[edge_cross].reshape(-1, 2)
    edge_ids, segs = np.unique(seg_edges, return_inverse=True)
    segs = segs.reshape(-1, 2)
    if edge_ids.size:
        ev = ico.edges[edge_ids]
        pts = _edge_roots(func, ico.vertices[ev[:, 0]], ico.vertices[ev[:, 1]],
                          f[ev[:, 0]], f[ev[:, 1]], E, refine)
    else:
        pts = np.zeros((0, 3))
    folds = count_folds(func, pts, segs, E)
    return ContourResult(pts, edge_ids, segs, perturbed, scale < 1e-8, folds)


def stitch(result: ContourResult) -> list[PolyCurve]:
    """Chain crossing segments into closed curves via shared edges."""
    segs = result.segments
    if not len(segs):
        return []
    n = len(result.points)
    nbr = np.full((n, 2), -1)
    fill = np.zeros(n, dtype=int)
    for s0, s1 in segs:
        nbr[s0, fill[s0]] = s1
        fill[s0] += 1
        nbr[s1, fill[s1]] = s0
        fill[s1] += 1
    seen = np.zeros(n, dtype=bool)
    curves = []
    for start in range(n):
        if seen[start] or fill[start] == 0:
            continue
        loop = [start]
        seen[start] = True
        prev, cur = -1, start
        while True:
            nxt = nbr[cur, 0] if nbr[cur, 0] != prev else nbr[cur, 1]
            if nxt == start or nxt < 0 or seen[nxt]:
                break
            loop.append(nxt)
            seen[nxt] = True
            prev, cur = cur, nxt
        pts = result.points[loop]
        if len(pts) < 3:
            continue
        # coincident crossing points (shared vertex on a zero) would give zero-length segments
        keep = np.linalg.norm(pts - np.roll(pts, -1, axis=0), axis=1) > 1e-14
        pts = pts[keep]
        if len(pts) >= 3:
            curves.append(PolyCurve(pts, closed=True))
    return curves
