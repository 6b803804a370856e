"""Cones in R^3 over 1-varifolds on the unit sphere, with their numerical identities.

The cone over a piece with base vertices u_0, u_1, ... is the fan of planar
triangles (0, R u_i, R u_{i+1}), carrying the piece's multiplicity. Areas of
triangles inside balls are computed exactly (disk-triangle intersection in
the triangle's plane), so density and mass-growth ratios carry no
quadrature error beyond the base discretization.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import Varifold1, _extrapolate, _weighted_pieces, varifold_density

INNER_CUTOFF = 1e-3


@dataclass(frozen=True, eq=False)
class ConeVarifold:
    base: Varifold1
    R: float
    triangles: np.ndarray  # (T, 3, 3); first vertex is the apex
    multiplicity: np.ndarray  # (T,)
    piece: np.ndarray  # (T,) index of the base piece

    @property
    def areas(self) -> np.ndarray:
        t = self.triangles
        return 0.5 * np.linalg.norm(np.cross(t[:, 1], t[:, 2]), axis=1)

    @property
    def normals(self) -> np.ndarray:
        n = np.cross(self.triangles[:, 1], self.triangles[:, 2])
        return n / np.linalg.norm(n, axis=1, keepdims=True)

    def mass(self) -> float:
        return float((self.multiplicity * self.areas).sum())

    def dilate(self, lam: float) -> "ConeVarifold":
        return ConeVarifold(self.base, self.R * lam, self.triangles * lam,
                            self.multiplicity, self.piece)


def build_cone(V, R: float) -> ConeVarifold:
    """Truncated cone of radius ``R`` over a varifold on the round unit sphere."""
    if not R > 0:
        raise ValueError("R must be positive")
    pieces = _weighted_pieces(V)
    if not pieces:
        raise ValueError("empty base")
    tris, mults, owner = [], [], []
    for k, (curve, m) in enumerate(pieces):
        v = curve.vertices
        if np.abs(np.linalg.norm(v, axis=1) - 1).max() > 1e-8:
            raise ValueError("cone bases must lie on the unit sphere")
        a, b = curve.segments()
        t = np.zeros((len(a), 3, 3))
        t[:, 1], t[:, 2] = R * a, R * b
        tris.append(t)
        mults.append(np.full(len(a), m))
        owner.append(np.full(len(a), k))
    base = V if isinstance(V, Varifold1) else Varifold1(tuple(pieces))
    return ConeVarifold(base, float(R), np.concatenate(tris), np.concatenate(mults),
                        np.concatenate(owner))


def _sector_or_triangle(P, Q, r):
    """Signed area of disk(0, r) cap triangle(0, P, Q) in 2D, vectorized."""
    d = Q - P
    A = (d * d).sum(1)
    B = 2 * (P * d).sum(1)
    C = (P * P).sum(1) - r * r
    disc = B * B - 4 * A * C
    real = (disc > 0) & (A > 0)
    sq = np.sqrt(np.where(real, disc, 0.0))
    safeA = np.where(A > 0, A, 1.0)
    t1 = np.where(real, np.clip((-B - sq) / (2 * safeA), 0, 1), 1.0)
    t2 = np.where(real, np.clip((-B + sq) / (2 * safeA), 0, 1), 1.0)
    X1 = P + t1[:, None] * d
    X2 = P + t2[:, None] * d

    def cross(u, v):
        return u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]

    def sector(u, v):
        return 0.5 * r * r * np.arctan2(cross(u, v), (u * v).sum(1))

    return sector(P, X1) + 0.5 * cross(X1, X2) + sector(X2, Q)


def triangle_ball_area(tris: np.ndarray, center, r: float) -> np.ndarray:
    """Area of each planar triangle inside the ball B(center, r)."""
    tris = np.asarray(tris, float)
    c = np.asarray(center, float)
    p0 = tris[:, 0]
    e1 = tris[:, 1] - p0
    nrm = np.cross(e1, tris[:, 2] - p0)
    nn = np.linalg.norm(nrm, axis=1)
    out = np.zeros(len(tris))
    ok = nn > 0
    nrm = nrm[ok] / nn[ok, None]
    h = ((c - p0[ok]) * nrm).sum(1)
    rho2 = r * r - h * h
    live = rho2 > 0
    idx = np.flatnonzero(ok)[live]
    if not idx.size:
        return out
    nrm, h, rho = nrm[live], h[live], np.sqrt(rho2[live])
    foot = c - h[:, None] * nrm
    u = e1[idx] / np.linalg.norm(e1[idx], axis=1, keepdims=True)
    w = np.cross(nrm, u)
    area = np.zeros(idx.size)
    for k in range(3):
        P3 = tris[idx, k] - foot
        Q3 = tris[idx, (k + 1) % 3] - foot
        P = np.stack([(P3 * u).sum(1), (P3 * w).sum(1)], 1)
        Q = np.stack([(Q3 * u).sum(1), (Q3 * w).sum(1)], 1)
        area += _sector_or_triangle(P, Q, rho)
    out[idx] = np.abs(area)
    return out


def cone_ball_mass(C: ConeVarifold, center, r: float) -> float:
    return float((C.multiplicity * triangle_ball_area(C.triangles, center, r)).sum())


def cone_dilation_check(C: ConeVarifold, lam: float) -> float:
    """Relative area discrepancy between the cone dilated by ``lam`` and the original.

    Both are restricted to the ball about the apex of radius
    R * min(1, lam, 1/lam), which lies inside both truncations; the dilated
    area is computed at radius rho / lam and scaled by lam^2.
    """
    if not 0.5 <= lam <= 2:
        raise ValueError("lam must lie in [0.5, 2]")
    rho = C.R * min(1.0, lam, 1.0 / lam)
    original = cone_ball_mass(C, np.zeros(3), rho)
    if lam == 1:
        return 0.0 * original
    dilated = C.dilate(lam)
    scaled = cone_ball_mass(dilated, np.zeros(3), rho * lam) / lam**2
    return abs(scaled - original) / original


@dataclass(frozen=True)
class ConeDensity:
    value: float
    base_value: float
    scales: tuple
    ratios: tuple
    converged: bool

    def __float__(self):
        return self.value


def cone_density(C: ConeVarifold, y, scales=None, spread_tol: float = 0.05) -> ConeDensity:
    """2-density of the cone at ``y`` from area ratios, with the base density at y/|y|."""
    y = np.asarray(y, float)
    ny = np.linalg.norm(y)
    if not 0.1 * C.R < ny < 0.9 * C.R:
        raise ValueError("|y| must lie in (0.1 R, 0.9 R)")
    h = max(c.max_step() for c, _ in C.base.pieces)
    if scales is None:
        scales = list(np.geomspace(0.25, max(5 * h, 0.02), 4) * ny)
    scales = sorted((float(s) for s in scales), reverse=True)
    ratios = [cone_ball_mass(C, y, r) / (np.pi * r * r) for r in scales]
    value, ok = _extrapolate(scales, ratios, spread_tol)
    base = float(varifold_density(C.base, y / ny))
    return ConeDensity(value, base, tuple(scales), tuple(ratios), ok)


def cone_mass_growth(C: ConeVarifold, y) -> float:
    """2 * area(C cap B(y, 0.9 R)) / (0.9 R)^2, which tends to the base mass."""
    y = np.asarray(y, float)
    ny = np.linalg.norm(y)
    if ny == 0:
        raise ValueError("y must be nonzero")
    if C.R < 20 * ny * (1 - 1e-12):
        raise ValueError("cone extent must be at least 20 |y|")
    r = 0.9 * C.R
    return 2 * cone_ball_mass(C, y, r) / r**2


# ---------------------------------------------------------------- vector fields


@dataclass(frozen=True)
class RotationField:
    """X(x) = omega x x; an infinitesimal isometry."""

    omega: tuple = (0.0, 0.0, 1.0)

    def __call__(self, x):
        return np.cross(np.asarray(self.omega, float), x)

    def jacobian(self, x):
        w = np.asarray(self.omega, float)
        W = np.array([[0, -w[2], w[1]], [w[2], 0, -w[0]], [-w[1], w[0], 0]])
        return np.broadcast_to(W, (len(np.atleast_2d(x)), 3, 3)).copy()

    def sup_norm(self, radius: float) -> float:
        return float(np.linalg.norm(self.omega) * radius)


@dataclass(frozen=True)
class BumpField:
    """X(x) = phi(|x - c| / rho) (w + A (x - c)) with phi(s) = exp(1 - 1/(1 - s^2)).

    Smooth, supported in the closed ball B(c, rho), with phi(0) = 1.
    """

    center: tuple
    radius: float
    vector: tuple
    linear: tuple = ((0.0, 0.0, 0.0),) * 3

    def _parts(self, x):
        x = np.atleast_2d(np.asarray(x, float))
        d = x - np.asarray(self.center, float)
        s2 = (d * d).sum(1) / self.radius**2
        inside = s2 < 1
        phi = np.zeros(len(x))
        q = 1 - s2[inside]
        phi[inside] = np.exp(1 - 1 / q)
        # grad phi = phi * (-2 / (rho^2 (1 - s^2)^2)) * d
        g = np.zeros(len(x))
        g[inside] = phi[inside] * (-2 / (self.radius**2 * q * q))
        A = np.asarray(self.linear, float)
        val = np.asarray(self.vector, float) + d @ A.T
        return d, phi, g, val, A

    def __call__(self, x):
        d, phi, g, val, A = self._parts(x)
        return phi[:, None] * val

    def jacobian(self, x):
        d, phi, g, val, A = self._parts(x)
        return phi[:, None, None] * A + val[:, :, None] * (g[:, None] * d)[:, None, :]

    def sup_norm(self, radius: float | None = None, samples: int = 4096) -> float:
        """Max |X| over the support, sampled on radial shells (exact when A = 0)."""
        w = np.asarray(self.vector, float)
        A = np.asarray(self.linear, float)
        if not A.any():
            return float(np.linalg.norm(w))
        rng = np.random.default_rng(0)
        d = rng.standard_normal((samples, 3))
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        s = np.linspace(0, 1, 65)[:-1]
        pts = (s[:, None, None] * self.radius * d[None]).reshape(-1, 3) + np.asarray(self.center)
        return float(np.linalg.norm(self(pts), axis=1).max())


def random_bump_field(rng, C: ConeVarifold, allow_linear: bool = True) -> BumpField:
    """Bump field meeting the cone, with support away from the apex and the truncation.

    The center sits at distance 0.3 R to 0.6 R along the ray through a random
    base vertex, shifted sideways by less than half the support radius.
    """
    R = C.R
    verts = np.concatenate([c.vertices for c, _ in C.base.pieces])
    u = verts[rng.integers(len(verts))]
    rho = rng.uniform(0.1, 0.25) * R
    shift = rng.standard_normal(3)
    shift -= (shift @ u) * u
    shift *= rng.uniform(0, 0.5) * rho / max(np.linalg.norm(shift), 1e-300)
    center = rng.uniform(0.3, 0.6) * R * u + shift
    w = rng.standard_normal(3)
    A = 0.3 * rng.standard_normal((3, 3)) / R if allow_linear else np.zeros((3, 3))
    return BumpField(tuple(center), float(rho), tuple(w), tuple(map(tuple, A)))


# --------------------------------------------------------- first variation


def _gauss01(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (x + 1), 0.5 * w


@dataclass(frozen=True)
class ConeQuadrature:
    points: np.ndarray  # (N, 3)
    weights: np.ndarray  # (N,) area weights times multiplicity
    frames: np.ndarray  # (N, 3, 3) rows: tangent e1, tangent e2, normal


def cone_quadrature(C: ConeVarifold, support=None, panels: int = 24, t_nodes: int = 4,
                    s_nodes: int = 4) -> ConeQuadrature:
    """Gauss rule on each triangle in coordinates x = tau (A + s (B - A)).

    tau runs from the inner cutoff to 1 in ``panels`` equal panels. With a
    ``support`` ball (center, radius), triangles missing it are skipped and
    tau is restricted to the radial band that can meet it.
    """
    T = C.triangles
    A, B = T[:, 1], T[:, 2]
    keep = np.ones(len(T), dtype=bool)
    lo = np.full(len(T), INNER_CUTOFF)
    hi = np.ones(len(T))
    if support is not None:
        c, rho = np.asarray(support[0], float), float(support[1])
        keep = triangle_ball_area(T, c, rho) > 0
        nc = np.linalg.norm(c)
        inner = np.linalg.norm(0.5 * (A + B), axis=1)
        lo = np.maximum(lo, (nc - rho) / C.R)
        hi = np.minimum(hi, (nc + rho) / np.maximum(inner, 1e-300))
        keep &= hi > lo
    A, B, lo, hi = A[keep], B[keep], lo[keep], hi[keep]
    mult = C.multiplicity[keep]
    nrm = np.cross(A, B)
    jac = np.linalg.norm(nrm, axis=1)
    nrm = nrm / jac[:, None]
    e1 = A / np.linalg.norm(A, axis=1, keepdims=True)
    e2 = np.cross(nrm, e1)
    frames = np.stack([e1, e2, nrm], axis=1)
    tg, tw = _gauss01(t_nodes)
    sg, sw = _gauss01(s_nodes)
    edges = np.linspace(0, 1, panels + 1)
    tt = ((edges[:-1, None] + np.diff(edges)[:, None] * tg).ravel())
    ww = (np.diff(edges)[:, None] * tw).ravel()
    span = hi - lo
    tau = lo[:, None] + span[:, None] * tt  # (K, P)
    wt = span[:, None] * ww
    base = A[:, None, :] + sg[None, :, None] * (B - A)[:, None, :]  # (K, S, 3)
    pts = tau[:, :, None, None] * base[:, None, :, :]  # (K, P, S, 3)
    w = (jac * mult)[:, None, None] * (wt * tau)[:, :, None] * sw[None, None, :]
    npts = pts.shape[1] * pts.shape[2]
    return ConeQuadrature(pts.reshape(-1, 3), w.ravel(),
                          np.repeat(frames, npts, axis=0))


def _support_of(X):
    if isinstance(X, BumpField):
        return (X.center, X.radius)
    return None


def first_variation(V, X, **quad) -> float:
    """Integral of the tangential divergence of X over a cone or a curve varifold.

    For cones: sum over triangles of div_P X = tr DX - n.DX.n. For curve
    varifolds: sum over chords of t.DX.t times multiplicity (for X tangent
    to the sphere this is the intrinsic first variation).
    """
    if isinstance(V, ConeVarifold):
        Q = cone_quadrature(V, _support_of(X), **quad)
        if not len(Q.points):
            return 0.0
        D = X.jacobian(Q.points)
        n = Q.frames[:, 2]
        div = np.trace(D, axis1=1, axis2=2) - np.einsum("ni,nij,nj->n", n, D, n)
        return float(Q.weights @ div)
    return _curve_first_variation(V, X, **quad)


def _curve_first_variation(V, X, nodes: int = 4) -> float:
    g, gw = _gauss01(nodes)
    total = 0.0
    for curve, m in _weighted_pieces(V):
        a, b = curve.segments()
        d = b - a
        L = np.linalg.norm(d, axis=1)
        t = d / L[:, None]
        pts = (a[:, None, :] + g[None, :, None] * d[:, None, :]).reshape(-1, 3)
        D = X.jacobian(pts).reshape(len(a), nodes, 3, 3)
        val = np.einsum("ki,kqij,kj->kq", t, D, t)
        total += m * float((val @ gw * L).sum())
    return total


def _flow(X, x, eps: float, steps: int):
    """RK4 for x' = X(x), J' = DX(x) J; returns the Jacobians at time eps."""
    h = eps / steps
    J = np.broadcast_to(np.eye(3), (len(x), 3, 3)).copy()

    def f(x, J):
        return X(x), X.jacobian(x) @ J

    for _ in range(steps):
        k1x, k1J = f(x, J)
        k2x, k2J = f(x + 0.5 * h * k1x, J + 0.5 * h * k1J)
        k3x, k3J = f(x + 0.5 * h * k2x, J + 0.5 * h * k2J)
        k4x, k4J = f(x + h * k3x, J + h * k3J)
        x = x + h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        J = J + h / 6 * (k1J + 2 * k2J + 2 * k3J + k4J)
    return J


def flowed_mass_change(C: ConeVarifold, X, eps: float, steps: int = 8, **quad) -> float:
    """Area change of the cone under the time-eps flow of X (same quadrature as first_variation)."""
    Q = cone_quadrature(C, _support_of(X), **quad)
    J = _flow(X, Q.points, eps, steps)
    e1 = np.einsum("nij,nj->ni", J, Q.frames[:, 0])
    e2 = np.einsum("nij,nj->ni", J, Q.frames[:, 1])
    factor = np.linalg.norm(np.cross(e1, e2), axis=1)
    return float(Q.weights @ (factor - 1.0))


@dataclass(frozen=True)
class GradientCheck:
    first_variation: float
    eps: tuple
    finite_differences: tuple
    errors: tuple
    ratio: float


def gradient_check(C: ConeVarifold, X, eps=(1e-3, 1e-4), **quad) -> GradientCheck:
    """Compare first_variation with forward differences of the flowed area."""
    dv = first_variation(C, X, **quad)
    fd = tuple(flowed_mass_change(C, X, e, **quad) / e for e in eps)
    err = tuple(abs(f - dv) for f in fd)
    ratio = err[0] / err[1] if err[1] > 0 else float("inf")
    return GradientCheck(dv, tuple(eps), fd, err, ratio)
