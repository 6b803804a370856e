"""Polynomial sweepouts of the sphere: zero-set cycles, Crofton mass, sup-mass scans.

The family F_k assigns to a nonzero coefficient vector q (up to positive
scale) the boundary of {q <= 0} on the surface, where q ranges over the span
of 1, x1, x2, x3, x1^2, x1x2, x1x3, x2x3, x3^2 truncated to its first k + 1
entries. x2^2 is left out since on the unit sphere it is 1 - x1^2 - x3^2.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .contour import contour, icosphere, stitch
from .curves import Cycle1, ball_mass
from .rng import philox
from .rootfind import isolate_roots, trig_coefficients
from .surface import EllipsoidParams, SPHERE, radial_to_surface

log = logging.getLogger(__name__)

QUADRIC_MONOMIALS = (
    (0, 0, 0),
    (1, 0, 0), (0, 1, 0), (0, 0, 1),
    (2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 1, 1), (0, 0, 2),
)


def _monomial_values(x: np.ndarray, exps: np.ndarray) -> np.ndarray:
    x = np.atleast_2d(x)
    out = np.ones((len(x), len(exps)))
    for j, e in enumerate(exps):
        for axis in range(3):
            if e[axis]:
                out[:, j] *= x[:, axis] ** e[axis]
    return out


@dataclass(frozen=True, eq=False)
class SweepoutFamily:
    """Finite polynomial basis; a parameter q picks the cycle of sum_j q_j basis_j.

    ``basis`` is a tuple of coefficient tables, each a mapping from exponent
    triples to coefficients.
    """

    basis: tuple
    surface: EllipsoidParams = SPHERE
    name: str = ""

    @property
    def k(self) -> int:
        return len(self.basis) - 1

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @cached_property
    def monomials(self) -> np.ndarray:
        exps = sorted({e for table in self.basis for e in table})
        return np.array(exps, dtype=int).reshape(-1, 3)

    @cached_property
    def matrix(self) -> np.ndarray:
        """Basis coefficients, shape (dimension, n_monomials)."""
        index = {tuple(e): i for i, e in enumerate(self.monomials)}
        m = np.zeros((self.dimension, len(self.monomials)))
        for j, table in enumerate(self.basis):
            for e, c in table.items():
                m[j, index[tuple(e)]] = c
        return m

    @property
    def degree(self) -> int:
        return int(self.monomials.sum(axis=1).max())

    def polynomial(self, q) -> "SurfacePolynomial":
        return SurfacePolynomial(self, normalize_param(q))

    def values_at(self, x: np.ndarray) -> np.ndarray:
        """Basis functions at points ``x``, shape (n, dimension)."""
        return _monomial_values(x, self.monomials) @ self.matrix.T

    @cached_property
    def _grid_cache(self) -> dict:
        return {}

    def grid_values(self, level: int) -> np.ndarray:
        if level not in self._grid_cache:
            verts = radial_to_surface(icosphere(level).vertices, self.surface)
            self._grid_cache[level] = self.values_at(verts)
        return self._grid_cache[level]


@dataclass(frozen=True, eq=False)
class SurfacePolynomial:
    family: SweepoutFamily
    q: np.ndarray

    def __call__(self, x) -> np.ndarray:
        return self.family.values_at(np.atleast_2d(x)) @ self.q

    @property
    def degree(self) -> int:
        return self.family.degree


def polynomial_family(k: int, surface: EllipsoidParams = SPHERE) -> SweepoutFamily:
    """F_k: the span of 1 and the first k of x1, x2, x3, x1^2, x1x2, x1x3, x2x3, x3^2."""
    if not 1 <= k <= 8:
        raise ValueError("k must be in 1..8")
    basis = tuple({e: 1.0} for e in QUADRIC_MONOMIALS[: k + 1])
    return SweepoutFamily(basis, surface, f"F{k}")


def harmonic_family(d: int, surface: EllipsoidParams = SPHERE) -> SweepoutFamily:
    """Representatives of polynomials of degree <= d modulo x1^2 + x2^2 + x3^2 - 1.

    Monomials x1^a x2^b x3^c with b <= 1 span the quotient: 2j + 1 of them in
    each degree j, (d + 1)^2 in total.
    """
    if not 0 <= d <= 4:
        raise ValueError("degree must be in 0..4")
    exps = []
    for deg in range(d + 1):
        for b in (0, 1):
            for a in range(deg - b, -1, -1):
                c = deg - b - a
                if c >= 0:
                    exps.append((a, b, c))
    return SweepoutFamily(tuple({e: 1.0} for e in exps), surface, f"A{d}")


def normalize_param(q) -> np.ndarray:
    """Unit norm, first nonzero entry positive (a point of RP^k)."""
    q = np.asarray(q, dtype=float).ravel()
    nrm = np.linalg.norm(q)
    if nrm == 0:
        raise ValueError("parameter must be nonzero")
    q = q / nrm
    nz = np.flatnonzero(np.abs(q) > 0)
    if q[nz[0]] < 0:
        q = -q
    return q


def projective_distance(p, q) -> float:
    p = normalize_param(p)
    q = normalize_param(q)
    return float(min(np.linalg.norm(p - q), np.linalg.norm(p + q)))


def _contour_param(F: SweepoutFamily, q, level: int):
    poly = SurfacePolynomial(F, q)
    return poly, contour(poly, level, F.surface, grid_values=F.grid_values(level) @ q)


def cycle_mass(F: SweepoutFamily, q, level: int = 6) -> float:
    """Arc-length mass of F(q) without building curves."""
    q = normalize_param(q)
    _, res = _contour_param(F, q, level)
    return res.mass()


def resolved_mass(F: SweepoutFamily, q, level: int = 6) -> tuple[float, bool]:
    """Mass at ``level`` and whether the grid resolves the zero set (no folds)."""
    _, res = _contour_param(F, normalize_param(q), level)
    return res.mass(), res.resolved


def evaluate_cycle(F: SweepoutFamily, q, resolution: int = 6) -> Cycle1:
    """Traced zero set of the family's polynomial at ``q`` as a mod-2 cycle."""
    if resolution < 4:
        raise ValueError("resolution must be at least 4")
    q = normalize_param(q)
    poly, res = _contour_param(F, q, resolution)
    flags = []
    if res.perturbed:
        flags.append("perturbed")
        log.debug("grid vertex on the zero set of %s; offset applied", q)
    if res.near_degenerate:
        flags.append("near-degenerate")
    if not res.resolved:
        flags.append("unresolved")
    return Cycle1(tuple(stitch(res)), source=poly, flags=tuple(flags))


def _circle_frames(u):
    k = np.eye(3)[np.argmin(np.abs(u), axis=1)]
    e1 = np.cross(u, k)
    e1 /= np.linalg.norm(e1, axis=1, keepdims=True)
    e2 = np.cross(u, e1)
    return e1, e2


def uniform_sphere(rng, n: int) -> np.ndarray:
    x = rng.standard_normal((n, 3))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


@dataclass(frozen=True)
class CroftonEstimate:
    value: float
    stderr: float
    samples: int
    discarded: int
    max_count: int
    count_histogram: tuple

    def __float__(self):
        return self.value


def _counts_polynomial(poly, u, chunk=20000):
    d = max(poly.degree, 1)
    nt = 2 * d + 2
    t = 2 * np.pi * np.arange(nt) / nt
    counts = np.empty(len(u), dtype=int)
    for s in range(0, len(u), chunk):
        uu = u[s:s + chunk]
        e1, e2 = _circle_frames(uu)
        pts = np.cos(t)[None, :, None] * e1[:, None, :] + np.sin(t)[None, :, None] * e2[:, None, :]
        vals = poly(pts.reshape(-1, 3)).reshape(len(uu), nt)
        a, b = trig_coefficients(vals, d)
        counts[s:s + chunk] = isolate_roots(a, b).counts
    return counts


def _counts_polyline(curves, u, chunk=2000):
    counts = np.zeros(len(u), dtype=int)
    for c in curves:
        v = c.vertices
        for s in range(0, len(u), chunk):
            h = v @ u[s:s + chunk].T > 0
            nxt = np.roll(h, -1, axis=0) if c.closed else h[1:]
            cur = h if c.closed else h[:-1]
            counts[s:s + chunk] += (cur != nxt).sum(axis=0)
    return counts


def crofton_mass(c: Cycle1, samples: int = 100_000, seed: int = 0) -> CroftonEstimate:
    """Length of a cycle on the unit sphere from great-circle intersection counts.

    length = (1/4) * integral over poles u in S^2 of #(c cap u^perp), estimated
    with uniformly sampled poles. When the cycle records its defining
    polynomial the counts come from certified root isolation of the
    polynomial restricted to each great circle; otherwise from sign changes
    along the polylines. Samples whose roots cannot be isolated are dropped.
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    rng = philox(seed, stream=1)
    u = uniform_sphere(rng, samples)
    if isinstance(c, Cycle1) and c.source is not None:
        counts = _counts_polynomial(c.source, u)
    else:
        curves = c.curves if isinstance(c, Cycle1) else [c]
        counts = _counts_polyline(curves, u)
    ok = counts >= 0
    good = counts[ok].astype(float)
    n = good.size
    value = math.pi * good.mean() if n else float("nan")
    stderr = math.pi * good.std(ddof=1) / math.sqrt(n) if n > 1 else float("nan")
    hist = tuple(int(x) for x in np.bincount(counts[ok])) if n else ()
    return CroftonEstimate(value, stderr, n, int((~ok).sum()),
                           int(good.max()) if n else 0, hist)


@dataclass(frozen=True)
class ScanResult:
    family: str
    sup_mass: float
    argmax: np.ndarray
    evaluations: int
    seed: int
    low_confidence: bool


LOW_BUDGET = 1000


def sup_mass_scan(F: SweepoutFamily, budget: int = 5000, seed: int = 0, level: int = 6,
                  batch: int = 128, step0: float = 0.25, step_min: float = 1e-4) -> ScanResult:
    """Estimate sup of mass over RP^k by uniform sampling plus pattern search.

    Rounds repeat until the budget is spent: ``batch`` uniform samples, then
    a first-improvement pattern search from the best sample of that batch,
    halving the step down to ``step_min``. For families of degree <= 2 the
    poll directions include ones adapted to the principal axes of the
    quadratic part. Parameters whose zero set the grid does not resolve are
    skipped. The evaluation sequence does not depend on the budget, which
    only decides where it stops, so the estimate is nondecreasing in it.
    """
    if budget < 1:
        raise ValueError("budget must be positive")
    low = budget < LOW_BUDGET
    if low:
        log.warning("budget %d below %d: scan is low-confidence", budget, LOW_BUDGET)
    rng = philox(seed, stream=2)
    dim = F.dimension
    adapted = F.degree <= 2 and dim > 1
    best_val, best_q = -np.inf, None
    used = 0

    def evaluate(q):
        nonlocal used, best_val, best_q
        used += 1
        m, ok = resolved_mass(F, q, level)
        if not ok:
            return -np.inf
        if m > best_val:
            best_val, best_q = m, normalize_param(q)
        return m

    while used < budget:
        x, fx = None, -np.inf
        for _ in range(min(batch, budget - used)):
            q = rng.standard_normal(dim)
            m = evaluate(q)
            if m > fx:
                x, fx = normalize_param(q), m
        step = step0
        while x is not None and step >= step_min and used < budget:
            dirs = np.eye(dim)
            if adapted:
                dirs = np.concatenate([dirs, _adapted_directions(F, x)])
            improved = False
            for d in dirs:
                for sgn in (1.0, -1.0):
                    if used >= budget:
                        break
                    y = normalize_param(x + sgn * step * d)
                    fy = evaluate(y)
                    if fy > fx:
                        x, fx, improved = y, fy, True
                        break
                if improved:
                    break
            if not improved:
                step *= 0.5
    if best_q is None:
        best_val, best_q = float("nan"), np.full(dim, np.nan)
    return ScanResult(F.name, float(best_val), best_q, used, seed, low)


def _homogeneous_matrix(full) -> np.ndarray:
    """Symmetric M with x.M.x equal to the quadratic and constant part on the sphere."""
    c0, _, _, _, c4, c5, c6, c7, c8 = full
    return c0 * np.eye(3) + np.array([
        [c4, c5 / 2, c6 / 2],
        [c5 / 2, 0.0, c7 / 2],
        [c6 / 2, c7 / 2, c8],
    ])


def _matrix_coefficients(M) -> np.ndarray:
    """Coefficients (in the 9-term basis) of x.M.x restricted to the sphere."""
    return np.array([M[1, 1], 0, 0, 0, M[0, 0] - M[1, 1], 2 * M[0, 1], 2 * M[0, 2],
                     2 * M[1, 2], M[2, 2] - M[1, 1]])


def _adapted_directions(F: SweepoutFamily, q) -> np.ndarray:
    """Unit parameter directions that move single eigenvalues or rotate eigenvector pairs."""
    T = _degree2_matrix(F)
    lam, V = np.linalg.eigh(_homogeneous_matrix(q @ T))
    targets = []
    for i in range(3):
        targets.append(_matrix_coefficients(np.outer(V[:, i], V[:, i])))
        for j in range(i + 1, 3):
            R = np.outer(V[:, i], V[:, j])
            targets.append(_matrix_coefficients(R + R.T))
    out = []
    for t in targets:
        y = np.linalg.lstsq(T.T, t, rcond=None)[0]
        n = np.linalg.norm(y)
        if n > 1e-9:
            out.append(y / n)
    return np.array(out).reshape(-1, F.dimension)


def fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    phi = np.pi * (1 + 5**0.5) * i
    r = np.sqrt(1 - z * z)
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def concentration_profile(F: SweepoutFamily, q, radii, centers=None, level: int = 6,
                          n_centers: int = 96, cycle: Cycle1 | None = None) -> np.ndarray:
    """Max over centers of ball_mass(F(q), center, r) for each radius.

    Default centers are a Fibonacci lattice plus points spread along the cycle.
    """
    c = evaluate_cycle(F, q, level) if cycle is None else cycle
    radii = np.asarray(radii, dtype=float)
    if c.empty:
        return np.zeros_like(radii)
    if centers is None:
        on_curve = np.concatenate([cv.vertices for cv in c.curves])
        pick = on_curve[np.linspace(0, len(on_curve) - 1, n_centers // 2).astype(int)]
        centers = np.concatenate([fibonacci_sphere(n_centers), pick])
    centers = radial_to_surface(np.atleast_2d(centers), F.surface)
    return np.array([max(ball_mass(c, z, r, F.surface) for z in centers) for r in radii])


def no_concentration_bound(r) -> np.ndarray:
    return 4 * np.pi * np.sin(r)


def line_pair_distance(F: SweepoutFamily, q) -> float:
    """Upper bound on the projective distance from q to a product of two linear forms.

    The quadratic part is homogenized with x.x = 1 into a symmetric matrix;
    the nearest rank <= 2 indefinite (or rank-1) matrix is mapped back to
    coefficients and compared. Only meaningful for families of degree <= 2.
    """
    full = _as_degree2(F, q)
    lam, vec = np.linalg.eigh(_homogeneous_matrix(full))
    candidates = []
    order = np.argsort(np.abs(lam))
    lam2 = lam.copy()
    lam2[order[0]] = 0.0
    rest = lam2[order[1:]]
    if rest[0] * rest[1] <= 0:
        candidates.append(lam2)
    lam1 = np.zeros(3)
    lam1[order[2]] = lam[order[2]]
    candidates.append(lam1)
    best = np.inf
    for lm in candidates:
        coeffs = _matrix_coefficients((vec * lm) @ vec.T)
        if np.linalg.norm(coeffs) > 0:
            best = min(best, projective_distance(full, coeffs))
    return float(best)


def _degree2_matrix(F: SweepoutFamily) -> np.ndarray:
    """Linear map from family parameters to the 9 sphere coefficients, shape (dim, 9)."""
    index = {e: i for i, e in enumerate(QUADRIC_MONOMIALS)}
    per_monomial = np.zeros((len(F.monomials), 9))
    for r, e in enumerate(map(tuple, F.monomials)):
        if e == (0, 2, 0):
            # x2^2 = 1 - x1^2 - x3^2 on the sphere
            per_monomial[r, [0, 4, 8]] = 1.0, -1.0, -1.0
        elif e in index:
            per_monomial[r, index[e]] = 1.0
        else:
            raise ValueError("only degree <= 2 families are supported")
    return F.matrix @ per_monomial


def _as_degree2(F: SweepoutFamily, q) -> np.ndarray:
    return normalize_param(q) @ _degree2_matrix(F)
