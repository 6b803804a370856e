"""Points, tangent vectors and geodesics on the ellipsoid a1 x1^2 + a2 x2^2 + a3 x3^2 = 1.

Geodesics are integrated in ambient coordinates: the acceleration is the
constraint force of the quadric, and after every RK4 step the position is
projected back to the surface and the velocity to its tangent plane.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .curves import PolyCurve

NEAR_ROUND_TOL = 0.1
SURFACE_TOL = 1e-10


class GeodesicStepError(ValueError):
    """Integration step too coarse for the requested accuracy."""


@dataclass(frozen=True)
class EllipsoidParams:
    a1: float = 1.0
    a2: float = 1.0
    a3: float = 1.0

    def __post_init__(self):
        for name in ("a1", "a2", "a3"):
            value = float(getattr(self, name))
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")
            object.__setattr__(self, name, value)

    @classmethod
    def parse(cls, text: str) -> "EllipsoidParams":
        parts = [float(t) for t in text.replace(",", " ").split()]
        if len(parts) != 3:
            raise ValueError(f"expected three coefficients, got {text!r}")
        return cls(*parts)

    @property
    def a(self) -> np.ndarray:
        return np.array([self.a1, self.a2, self.a3])

    @property
    def semi_axes(self) -> np.ndarray:
        return 1.0 / np.sqrt(self.a)

    @property
    def near_round(self) -> bool:
        return bool(np.max(np.abs(self.a - 1.0)) <= NEAR_ROUND_TOL + 1e-12)

    @property
    def is_sphere(self) -> bool:
        return self.a1 == self.a2 == self.a3

    @property
    def is_unit_sphere(self) -> bool:
        return self.a1 == self.a2 == self.a3 == 1.0

    @property
    def strictly_ordered(self) -> bool:
        return self.a1 < self.a2 < self.a3

    def quadric(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (self.a * x * x).sum(axis=-1) - 1.0

    def normal(self, x) -> np.ndarray:
        """Outward unit normal at points ``x`` (..., 3)."""
        g = self.a * np.asarray(x, dtype=float)
        return g / np.linalg.norm(g, axis=-1, keepdims=True)

    def gauss_curvature(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        a = self.a
        return a.prod() / ((a * a * x * x).sum(axis=-1)) ** 2

    def normal_curvature(self, x, u) -> np.ndarray:
        """Normal curvature at ``x`` in the unit tangent direction ``u``."""
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        a = self.a
        return (a * u * u).sum(axis=-1) / np.sqrt((a * a * x * x).sum(axis=-1))

    def __str__(self):
        return f"E({self.a1:g},{self.a2:g},{self.a3:g})"


SPHERE = EllipsoidParams(1.0, 1.0, 1.0)


def _project_batch(p: np.ndarray, a: np.ndarray) -> np.ndarray:
    # closest point: x_i = p_i / (1 + 2 t a_i), Newton on t (convex, decreasing)
    p = np.atleast_2d(p)
    t = np.zeros(len(p))
    lower = -0.5 / a.max()
    ap2 = a * p * p
    for _ in range(60):
        d = 1.0 + 2.0 * t[:, None] * a
        g = (ap2 / d**2).sum(axis=1) - 1.0
        dg = -4.0 * (a * ap2 / d**3).sum(axis=1)
        step = g / dg
        t_new = t - step
        bad = t_new <= lower
        t_new[bad] = 0.5 * (t[bad] + lower)
        done = np.abs(t_new - t) <= 1e-16 * (1.0 + np.abs(t))
        t = t_new
        if done.all():
            break
    return p / (1.0 + 2.0 * t[:, None] * a)


def project_to_surface(p, E: EllipsoidParams = SPHERE) -> np.ndarray:
    """Closest point on the ellipsoid to ``p`` (a 3-vector or an (n, 3) array)."""
    p = np.asarray(p, dtype=float)
    single = p.ndim == 1
    pts = np.atleast_2d(p)
    if np.any(np.linalg.norm(pts, axis=1) == 0.0):
        raise ValueError("cannot project the zero vector")
    out = pts.copy()
    resid = np.abs(E.quadric(pts))
    pending = resid > 1e-15
    if pending.any():
        out[pending] = _project_batch(pts[pending], E.a)
    return out[0] if single else out


def radial_to_surface(p, E: EllipsoidParams = SPHERE) -> np.ndarray:
    """Scale ``p`` along its ray onto the ellipsoid (a diffeomorphism S^2 -> E^2)."""
    p = np.asarray(p, dtype=float)
    return p / np.sqrt((E.a * p * p).sum(axis=-1, keepdims=True))


def project_to_tangent(x, v, E: EllipsoidParams = SPHERE) -> np.ndarray:
    n = E.normal(x)
    v = np.asarray(v, dtype=float)
    return v - (v * n).sum(axis=-1, keepdims=True) * n


@dataclass(frozen=True)
class TangentVector:
    base: np.ndarray
    v: np.ndarray
    surface: EllipsoidParams = field(default=SPHERE)

    def __post_init__(self):
        base = project_to_surface(np.asarray(self.base, dtype=float), self.surface)
        v = project_to_tangent(base, self.v, self.surface)
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "v", v)

    def unit(self) -> "TangentVector":
        return TangentVector(self.base, self.v / np.linalg.norm(self.v), self.surface)


def _accel(x, v, a):
    lam = -(a * v * v).sum(axis=-1) / (a * a * x * x).sum(axis=-1)
    return lam[..., None] * a * x


def _rk4_step(x, v, h, a):
    h = np.asarray(h, dtype=float)
    if h.ndim:
        h = h[:, None]
    k1x, k1v = v, _accel(x, v, a)
    k2x = v + 0.5 * h * k1v
    k2v = _accel(x + 0.5 * h * k1x, k2x, a)
    k3x = v + 0.5 * h * k2v
    k3v = _accel(x + 0.5 * h * k2x, k3x, a)
    k4x = v + h * k3v
    k4v = _accel(x + h * k3x, k4x, a)
    x = x + h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
    v = v + h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
    return x, v


def _constrain(x, v, E):
    x = project_to_surface(x, E)
    v = project_to_tangent(x, v, E)
    return x, v / np.linalg.norm(v, axis=-1, keepdims=True)


def integrate_batch(x0, v0, h, nsteps: int, E: EllipsoidParams, record: bool = True):
    """Unit-speed geodesics from many initial states at once.

    Returns position and velocity arrays of shape (nsteps + 1, m, 3) when
    ``record`` is set, otherwise only the final states (m, 3).
    """
    x, v = _constrain(np.atleast_2d(np.asarray(x0, float)), np.atleast_2d(np.asarray(v0, float)), E)
    a = E.a
    if record:
        xs = np.empty((nsteps + 1,) + x.shape)
        vs = np.empty_like(xs)
        xs[0], vs[0] = x, v
    for i in range(nsteps):
        x, v = _rk4_step(x, v, h, a)
        x, v = _constrain(x, v, E)
        if record:
            xs[i + 1], vs[i + 1] = x, v
    if record:
        return xs, vs
    return x, v


def _shoot(x0, v0, length, step, E):
    n = max(1, math.ceil(length / step - 1e-12))
    h = length / n
    xs, vs = integrate_batch(x0, v0, h, n, E)
    return xs[:, 0], vs[:, 0], h


def geodesic_shoot(start: TangentVector, length: float, step: float = 0.01,
                   check: bool = True) -> PolyCurve:
    """Arc-length parametrized geodesic of the given length from ``start``.

    With ``check`` the integration is repeated at half the step; a change of
    the endpoint above 1e-6 raises :class:`GeodesicStepError`. The returned
    curve carries unit tangents and exact parameter increments as arc lengths.
    """
    if length <= 0 or step <= 0:
        raise ValueError("length and step must be positive")
    E = start.surface
    v0 = start.v
    if abs(np.linalg.norm(v0) - 1.0) > 1e-9:
        raise ValueError("start direction must be unit-norm")
    xs, vs, h = _shoot(start.base, v0, length, step, E)
    if check:
        xf, vf, _ = _shoot(start.base, v0, length, h / 2, E)
        drift = np.linalg.norm(xf[-1] - xs[-1])
        if drift > 1e-6:
            raise GeodesicStepError(f"step {step} too large: half-step endpoint moved by {drift:.2e}")
        xs, vs = xf[::2], vf[::2]
    seglen = np.full(len(xs) - 1, h)
    return PolyCurve(xs, closed=False, seglen=seglen, tangents=vs)


def _hermite(x0, v0, x1, v1, h, t):
    """Cubic Hermite interpolation on [0, h] at fractions t (broadcast over rows)."""
    t = t[:, None]
    h00 = 2 * t**3 - 3 * t**2 + 1
    h10 = t**3 - 2 * t**2 + t
    h01 = -2 * t**3 + 3 * t**2
    h11 = t**3 - t**2
    return h00 * x0 + h10 * h * v0 + h01 * x1 + h11 * h * v1


def sample_geodesic(x0, v0, arclengths, E: EllipsoidParams, step: float = 0.01) -> np.ndarray:
    """Positions of the geodesic from (x0, v0) at the given arc lengths (>= 0)."""
    s = np.asarray(arclengths, dtype=float)
    total = float(s.max()) if s.size else 0.0
    if total <= 0:
        return np.repeat(np.atleast_2d(x0), len(s), axis=0)
    xs, vs, h = _shoot(x0, v0, total, step, E)
    idx = np.minimum((s / h).astype(int), len(xs) - 2)
    frac = s / h - idx
    pts = _hermite(xs[idx], vs[idx], xs[idx + 1], vs[idx + 1], h, frac)
    return project_to_surface(pts, E)


def estimate_tangent(curve: PolyCurve, index: int, direction: int = 1) -> np.ndarray:
    """Unit tangent at a vertex; stored tangents win, else a quartic fit in chord length."""
    if curve.tangents is not None:
        t = curve.tangents[index]
        return direction * t / np.linalg.norm(t)
    n = len(curve.vertices)
    if curve.closed:
        offs = np.arange(-2, 3)
        ids = (index + offs) % n
        seg = curve.seglen
        s = np.zeros(5)
        for k in range(3, 5):
            s[k] = s[k - 1] + seg[ids[k - 1] % len(seg)]
        for k in range(1, -1, -1):
            s[k] = s[k + 1] - seg[ids[k] % len(seg)]
        s0 = 0.0
    else:
        lo = min(max(index - 2, 0), max(n - 5, 0))
        ids = np.arange(lo, min(lo + 5, n))
        cum = curve.cumulative
        s = cum[ids]
        s0 = cum[index]
    pts = curve.vertices[ids]
    deg = min(4, len(ids) - 1)
    d = np.array([np.polyval(np.polyder(np.polyfit(s - s0, pts[:, j], deg)), 0.0) for j in range(3)])
    return direction * d / np.linalg.norm(d)


def reshoot_defect(curve: PolyCurve, E: EllipsoidParams, start: int = 0, step: float = 0.01) -> float:
    """Max distance between ``curve`` and the geodesic re-shot from one of its vertices.

    The geodesic starts at vertex ``start`` with the curve's tangent there and is
    compared at every vertex's arc length (one full period for closed curves).
    """
    n = len(curve.vertices)
    if curve.closed:
        order = (start + np.arange(n + 1)) % n
        segs = np.roll(curve.seglen, -start)
        s = np.concatenate([[0.0], np.cumsum(segs)])
    else:
        if start != 0:
            raise ValueError("open curves are re-shot from their first vertex")
        order = np.arange(n)
        s = curve.cumulative
    x0 = curve.vertices[start]
    t0 = estimate_tangent(curve, start)
    pts = sample_geodesic(x0, t0, s, E, step)
    return float(np.linalg.norm(pts - curve.vertices[order], axis=1).max())


def _gauss_segment_lengths(speed, theta, nodes: int = 8) -> np.ndarray:
    g, w = np.polynomial.legendre.leggauss(nodes)
    lo, hi = theta[:-1], theta[1:]
    mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    t = mid[:, None] + half[:, None] * g[None, :]
    return (half[:, None] * w[None, :] * speed(t)).sum(axis=1)


def principal_ellipse(i: int, E: EllipsoidParams, n: int = 256) -> PolyCurve:
    """Closed curve {x_i = 0} on E, vertices equally spaced in the plane angle."""
    if i not in (1, 2, 3):
        raise ValueError("i must be 1, 2 or 3")
    if not E.near_round:
        raise ValueError(f"{E} is not near-round")
    if n < 64:
        raise ValueError("need at least 64 vertices")
    j, k = [m for m in range(3) if m != i - 1]
    A, B = E.semi_axes[j], E.semi_axes[k]
    theta = 2 * np.pi * np.arange(n + 1) / n
    verts = np.zeros((n, 3))
    verts[:, j] = A * np.cos(theta[:-1])
    verts[:, k] = B * np.sin(theta[:-1])
    tang = np.zeros((n, 3))
    tang[:, j] = -A * np.sin(theta[:-1])
    tang[:, k] = B * np.cos(theta[:-1])
    tang /= np.linalg.norm(tang, axis=1, keepdims=True)
    seglen = _gauss_segment_lengths(lambda t: np.hypot(A * np.sin(t), B * np.cos(t)), theta)
    return PolyCurve(verts, closed=True, seglen=seglen, tangents=tang)


def principal_lengths(E: EllipsoidParams, n: int = 512) -> np.ndarray:
    return np.array([principal_ellipse(i, E, n).length for i in (1, 2, 3)])


def surface_distance(E: EllipsoidParams, center, pts) -> np.ndarray:
    """Geodesic distance from ``center`` to each of ``pts``.

    Exact on spheres. On an ellipsoid, chord length with the second-order
    normal-curvature correction; good to O(c^5) and used only to sort points
    far from a ball boundary (see :func:`geodesic_distance` for the refined value).
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    center = np.asarray(center, dtype=float)
    if E.is_sphere:
        R = 1.0 / math.sqrt(E.a1)
        c = np.clip(pts @ center / R**2, -1.0, 1.0)
        return R * np.arccos(c)
    diff = pts - center
    chord = np.linalg.norm(diff, axis=1)
    u = diff / np.where(chord > 0, chord, 1.0)[:, None]
    mid = project_to_surface(0.5 * (pts + center), E)
    kn = E.normal_curvature(mid, u)
    return chord * (1.0 + (kn * chord) ** 2 / 24.0)


def geodesic_distance(E: EllipsoidParams, p, q, step: float = 0.005) -> float:
    """Geodesic distance by shooting from ``p`` and Newton-correcting the aim at ``q``."""
    p = project_to_surface(np.asarray(p, float), E)
    q = project_to_surface(np.asarray(q, float), E)
    if E.is_sphere:
        return float(surface_distance(E, p, q[None])[0])
    s = float(surface_distance(E, p, q[None])[0])
    if s < 1e-12:
        return 0.0
    n = E.normal(p)
    e1 = project_to_tangent(p, q - p, E)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    nq = E.normal(q)
    b1 = project_to_tangent(q, e1, E)
    b1 /= np.linalg.norm(b1)
    b2 = np.cross(nq, b1)

    def resid(params):
        ang, length = params
        d = math.cos(ang) * e1 + math.sin(ang) * e2
        xs, _, _ = _shoot(p, d, length, step, E)
        r = xs[-1] - q
        return np.array([r @ b1, r @ b2])

    params = np.array([0.0, s])
    for _ in range(20):
        f = resid(params)
        if np.linalg.norm(f) < 1e-11:
            break
        J = np.empty((2, 2))
        for k, dlt in enumerate((1e-7, 1e-7)):
            pp = params.copy()
            pp[k] += dlt
            J[:, k] = (resid(pp) - f) / dlt
        params = params - np.linalg.solve(J, f)
    return float(params[1])
