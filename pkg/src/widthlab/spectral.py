"""Morse index and nullity of closed geodesics, the W1..W9 candidates, and a closed-geodesic search.

The second variation of length along a closed unit-speed geodesic, restricted
to normal variations f N, is the periodic form

    Q(f) = integral of f'^2 - K f^2 ds,

with K the Gauss curvature. It is discretized on n equispaced arc-length
nodes by the periodic second difference, so its eigenvalues approximate
those of -d^2/ds^2 - K.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh

from .curves import PolyCurve
from .surface import (SPHERE, EllipsoidParams, _constrain, _rk4_step, principal_ellipse,
                      principal_lengths, project_to_surface)


@dataclass(frozen=True, eq=False)
class ClosedGeodesic:
    """A prime closed geodesic traversed ``covering`` times."""

    curve: PolyCurve
    surface: EllipsoidParams = SPHERE
    covering: int = 1
    label: str = ""

    def __post_init__(self):
        if not self.curve.closed:
            raise ValueError("closed geodesics need a closed curve")
        if self.covering < 1:
            raise ValueError("covering order must be positive")

    @property
    def prime_length(self) -> float:
        return self.curve.length

    @property
    def length(self) -> float:
        return self.covering * self.curve.length

    def cover(self, r: int) -> "ClosedGeodesic":
        return ClosedGeodesic(self.curve, self.surface, r, self.label)

    def points_at(self, s) -> np.ndarray:
        """Positions at arc lengths ``s`` (taken modulo the prime length)."""
        c = self.curve
        s = np.mod(np.asarray(s, float), c.length)
        cum = np.concatenate([[0.0], np.cumsum(c.seglen)])
        k = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(c.seglen) - 1)
        h = c.seglen[k]
        t = ((s - cum[k]) / h)[:, None]
        v = c.vertices
        x0, x1 = v[k], v[(k + 1) % len(v)]
        if c.tangents is None:
            p = (1 - t) * x0 + t * x1
        else:
            T = c.tangents
            m0, m1 = T[k] * h[:, None], T[(k + 1) % len(v)] * h[:, None]
            p = ((2 * t**3 - 3 * t**2 + 1) * x0 + (t**3 - 2 * t**2 + t) * m0
                 + (-2 * t**3 + 3 * t**2) * x1 + (t**3 - t**2) * m1)
        return project_to_surface(p, self.surface)


def principal_geodesic(i: int, E: EllipsoidParams, n: int = 1024, covering: int = 1) -> ClosedGeodesic:
    return ClosedGeodesic(principal_ellipse(i, E, n), E, covering, f"gamma{i}")


# ---------------------------------------------------------------- index form


def default_zero_tol(n: int) -> float:
    return 10 * (2 * np.pi / n) ** 2


@dataclass(frozen=True, eq=False)
class IndexForm:
    s: np.ndarray  # arc-length nodes over the full covering
    K: np.ndarray  # Gauss curvature at the nodes
    h: float

    @property
    def stiffness(self) -> np.ndarray:
        n = len(self.s)
        S = 2 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)
        S[0, -1] = S[-1, 0] = -1
        return S / self.h

    @property
    def mass_matrix(self) -> np.ndarray:
        return self.h * np.eye(len(self.s))

    def operator(self) -> np.ndarray:
        """Symmetric matrix M^{-1} (S - h diag K) whose spectrum is the index form's."""
        return self.stiffness / self.h - np.diag(self.K)

    def value(self, f) -> float:
        """Q(f) for nodal values f (periodic)."""
        f = np.asarray(f, float)
        df = (np.roll(f, -1) - f) / self.h
        return float(self.h * (df @ df) - self.h * (self.K * f) @ f)


def index_form(g: ClosedGeodesic, n: int) -> IndexForm:
    if n < 8:
        raise ValueError("grid too small")
    h = g.length / n
    s = h * np.arange(n)
    K = g.surface.gauss_curvature(g.points_at(s))
    return IndexForm(s, K, h)


@dataclass(frozen=True)
class IndexResult:
    index: int
    nullity: int
    ambiguous: bool
    eigenvalues: tuple
    n: int
    zero_tol: float


def index_nullity(g: ClosedGeodesic, n: int | None = None, zero_tol: float | None = None,
                  check_grid: bool = True) -> IndexResult:
    """Negative and near-zero eigenvalue counts of the discretized index form.

    ``index`` counts eigenvalues below -zero_tol, ``nullity`` those within
    zero_tol of 0. Eigenvalues with magnitude in (zero_tol, 2 zero_tol] make
    the result ambiguous.
    """
    r = g.covering
    n = 256 * r if n is None else int(n)
    if check_grid and n < 256 * r:
        raise ValueError("need n >= 256 * covering order")
    tol = default_zero_tol(n) if zero_tol is None else float(zero_tol)
    A = index_form(g, n).operator()
    k = min(n - 1, 4 * r + 12)
    while True:
        lam = eigh(A, eigvals_only=True, subset_by_index=[0, k])
        if lam[-1] > 2 * tol or k == n - 1:
            break
        k = min(n - 1, 2 * k)
    index = int((lam < -tol).sum())
    nullity = int((np.abs(lam) <= tol).sum())
    ambiguous = bool(((np.abs(lam) > tol) & (np.abs(lam) <= 2 * tol)).any())
    return IndexResult(index, nullity, ambiguous, tuple(float(x) for x in lam), n, tol)


# ------------------------------------------------------------- candidates

CANDIDATES = {
    "W1": ((1, 1),),
    "W2": ((2, 1),),
    "W3": ((3, 1),),
    "W4": ((1, 2),),
    "W5": ((1, 1), (2, 1)),
    "W6": ((2, 2),),
    "W7": ((1, 1), (3, 1)),
    "W8": ((2, 1), (3, 1)),
    "W9": ((3, 2),),
}


@dataclass(frozen=True)
class CandidateRow:
    label: str
    support: tuple  # principal geodesic numbers
    multiplicity: tuple
    mass: float
    index: int
    nullity: int
    index_source: str  # "computed" or "additive (assumed)"
    ambiguous: bool


@dataclass(frozen=True)
class CandidateTable:
    surface: EllipsoidParams
    lengths: tuple
    rows: tuple
    flags: dict = field(default_factory=dict)

    def row(self, label: str) -> CandidateRow:
        return next(r for r in self.rows if r.label == label)

    def mass(self, label: str) -> float:
        return self.row(label).mass


def candidate_table(E: EllipsoidParams, n: int = 512) -> CandidateTable:
    """W1..W9 with masses from the principal lengths and index/nullity of their supports.

    A doubled geodesic takes the index of the double cover. For sums of two
    distinct geodesics the indices and nullities are added, which is an
    assumption about the varifold index rather than a computed fact.
    """
    if not E.near_round:
        raise ValueError(f"{E} is not near-round")
    L = principal_lengths(E, 1024)
    cache = {}

    def idx(i, r):
        if (i, r) not in cache:
            cache[(i, r)] = index_nullity(principal_geodesic(i, E, 1024, r), n * r)
        return cache[(i, r)]

    rows = []
    for label, parts in CANDIDATES.items():
        mass = float(sum(r * L[i - 1] for i, r in parts))
        res = [idx(i, r) for i, r in parts]
        rows.append(CandidateRow(
            label, tuple(i for i, _ in parts), tuple(r for _, r in parts), mass,
            sum(x.index for x in res), sum(x.nullity for x in res),
            "computed" if len(parts) == 1 else "additive (assumed)",
            any(x.ambiguous for x in res)))
    m = {r.label: r.mass for r in rows}
    flags = {
        "W1<W2<W3": bool(m["W1"] < m["W2"] < m["W3"]),
        "W4<W5<W6": bool(m["W4"] < m["W5"] < m["W6"]),
        "W5=(W4+W6)/2": bool(abs(m["W5"] - (m["W4"] + m["W6"]) / 2) <= 1e-12 * m["W5"]),
        "W6-W7": float(m["W6"] - m["W7"]),
        "W6_vs_W7": "W6<W7" if m["W6"] < m["W7"] else ("W7<W6" if m["W7"] < m["W6"] else "tie"),
    }
    return CandidateTable(E, tuple(float(x) for x in L), tuple(rows), flags)


# ------------------------------------------------------- closed geodesic search


def _equator_frame(E, phi):
    A, B = E.semi_axes[0], E.semi_axes[1]
    x = np.stack([A * np.cos(phi), B * np.sin(phi), np.zeros_like(phi)], -1)
    t = np.stack([-A * np.sin(phi), B * np.cos(phi), np.zeros_like(phi)], -1)
    t /= np.linalg.norm(t, axis=-1, keepdims=True)
    return x, t


def _initial_state(E, phi, psi):
    x, t = _equator_frame(E, phi)
    up = np.zeros_like(x)
    up[..., 2] = 1.0
    v = np.cos(psi)[..., None] * t + np.sin(psi)[..., None] * up
    return x, v


def _section_coords(E, x, v):
    A, B = E.semi_axes[0], E.semi_axes[1]
    phi = np.mod(np.arctan2(x[:, 1] / B, x[:, 0] / A), 2 * np.pi)
    _, t = _equator_frame(E, phi)
    psi = np.arctan2(v[:, 2], (v * t).sum(1))
    return phi, psi


def _upcrossings(E, phi, psi, count: int, max_len: float, step: float):
    """States at the first ``count`` upward crossings of x3 = 0.

    Returns arrays (count, m) of phi, psi, arc length (nan when not reached
    within ``max_len``) plus the crossing points and velocities.
    """
    x, v = _initial_state(E, np.asarray(phi, float), np.asarray(psi, float))
    x, v = _constrain(x, v, E)
    m = len(x)
    a = E.a
    out_phi = np.full((count, m), np.nan)
    out_psi = np.full((count, m), np.nan)
    out_s = np.full((count, m), np.nan)
    out_x = np.full((count, m, 3), np.nan)
    out_v = np.full((count, m, 3), np.nan)
    found = np.zeros(m, dtype=int)
    s = 0.0
    nsteps = int(math.ceil(max_len / step))
    for _ in range(nsteps):
        live = found < count
        if not live.any():
            break
        x1, v1 = _constrain(*_rk4_step(x, v, step, a), E)
        up = live & (x[:, 2] < 0) & (x1[:, 2] >= 0)
        if up.any():
            idx = np.flatnonzero(up)
            frac = -x[idx, 2] / (x1[idx, 2] - x[idx, 2])
            xc, vc = _constrain(*_rk4_step(x[idx], v[idx], frac * step, a), E)
            ds = frac * step
            for _ in range(2):
                dt = -xc[:, 2] / vc[:, 2]
                xc, vc = _constrain(*_rk4_step(xc, vc, dt, a), E)
                ds = ds + dt
            ph, ps = _section_coords(E, xc, vc)
            k = found[idx]
            out_phi[k, idx] = ph
            out_psi[k, idx] = ps
            out_s[k, idx] = s + ds
            out_x[k, idx] = xc
            out_v[k, idx] = vc
            found[idx] += 1
        x, v = x1, v1
        s += step
    return out_phi, out_psi, out_s, out_x, out_v


def _wrap(d):
    return (d + np.pi) % (2 * np.pi) - np.pi


def _residual(phi0, psi0, phi1, psi1):
    return np.stack([_wrap(phi1 - phi0), psi1 - psi0], -1)


@dataclass(frozen=True)
class SearchReport:
    geodesics: tuple  # ClosedGeodesic, including coverings within the cap
    classes: tuple  # one representative prime geodesic per symmetry class
    class_sizes: tuple
    seeds: int
    newton_starts: int
    newton_failures: int


def _trace(E, phi, psi, length, step) -> PolyCurve:
    n = max(64, int(math.ceil(length / step)))
    h = length / n
    x, v = _constrain(*_initial_state(E, np.array([phi]), np.array([psi])), E)
    xs, vs = [x[0]], [v[0]]
    for _ in range(n - 1):
        x, v = _constrain(*_rk4_step(x, v, h, E.a), E)
        xs.append(x[0])
        vs.append(v[0])
    return PolyCurve(np.array(xs), closed=True, seglen=np.full(n, h), tangents=np.array(vs))


def _closure(E, phi, psi, length, step) -> np.ndarray:
    """|x(L) - x(0)| + |v(L) - v(0)| for each start; all runs share one step count."""
    phi, psi, length = (np.atleast_1d(np.asarray(z, float)) for z in (phi, psi, length))
    x0, v0 = _constrain(*_initial_state(E, phi, psi), E)
    n = int(math.ceil(length.max() / step))
    h = length / n
    x, v = x0, v0
    for _ in range(n):
        x, v = _constrain(*_rk4_step(x, v, h, E.a), E)
    return np.linalg.norm(x - x0, axis=1) + np.linalg.norm(v - v0, axis=1)


def _hausdorff(p, q) -> float:
    d = np.linalg.norm(p[:, None, :] - q[None, :, :], axis=2)
    return float(max(d.min(1).max(), d.min(0).max()))


_REFLECTIONS = [np.array([sx, sy, sz]) for sx in (1, -1) for sy in (1, -1) for sz in (1, -1)]


def _same_class(E, g, h, tol=1e-3) -> bool:
    if abs(g.prime_length - h.prime_length) > 1e-6:
        return False
    if E.is_sphere:
        return True  # rotations act transitively on great circles
    p = g.curve.vertices[:: max(1, len(g.curve.vertices) // 256)]
    q = h.curve.vertices[:: max(1, len(h.curve.vertices) // 256)]
    return any(_hausdorff(p, q * s) < tol for s in _REFLECTIONS)


def closed_geodesic_search(E: EllipsoidParams, cap: float, grid: int = 64, step: float = 0.02,
                           polish_step: float = 0.005, newton_iters: int = 25,
                           closure_tol: float = 1e-6) -> SearchReport:
    """Closed geodesics of length <= cap from a shooting search on x3 = 0.

    Seeds are a grid x grid array of (phi, psi): the point at plane angle phi
    on the equator {x3 = 0} and the direction at angle psi from the
    equator's tangent. psi = 0 follows the equator itself. For psi in (0, pi)
    the upward-crossing return map P is iterated; local minima of the seed
    residual |P^m - id| start a damped Newton solve with a finite-difference
    Jacobian. Solutions are kept when the traced curve closes up to
    ``closure_tol``, reduced to prime period and merged into symmetry
    classes (coordinate reflections; on a round sphere, equal length).
    """
    if not E.near_round:
        raise ValueError(f"{E} is not near-round")
    if cap > 8 * np.pi:
        raise ValueError("length cap above 8 pi")
    two_pi = 2 * np.pi
    max_m = max(1, int(math.floor(cap / (two_pi * 0.8))))
    phis = two_pi * np.arange(grid) / grid
    psis = np.pi * np.arange(grid) / grid
    found: list[ClosedGeodesic] = []
    counts: list[int] = []

    # the equator: psi = 0
    L3 = principal_lengths(E, 1024)[2]
    if L3 <= cap and _closure(E, 0.0, 0.0, L3, polish_step)[0] < closure_tol:
        found.append(ClosedGeodesic(_trace(E, 0.0, 0.0, L3, polish_step), E, 1, "equator"))
        counts.append(1)

    P, S = np.meshgrid(phis, psis[1:], indexing="ij")
    P, S = P.ravel(), S.ravel()
    ph, ps, sl, _, _ = _upcrossings(E, P, S, max_m, cap * 1.05, step)
    starts = []
    for m in range(max_m):
        res = np.linalg.norm(_residual(P, S, ph[m], ps[m]), axis=1)
        res = np.where(np.isfinite(res) & (sl[m] <= cap * 1.02), res, np.inf).reshape(grid, grid - 1)
        pad = np.pad(res, ((1, 1), (1, 1)), mode="constant", constant_values=np.inf)
        pad[0, 1:-1], pad[-1, 1:-1] = res[-1], res[0]  # periodic in phi
        neigh = np.stack([pad[1 + di: pad.shape[0] - 1 + di, 1 + dj: pad.shape[1] - 1 + dj]
                          for di in (-1, 0, 1) for dj in (-1, 0, 1) if di or dj])
        is_min = np.isfinite(res) & (res <= neigh.min(0))
        for i, j in zip(*np.nonzero(is_min)):
            starts.append((m + 1, phis[i], psis[1 + j]))
    failures = 0
    solved = []
    for m in sorted({s[0] for s in starts}):
        batch = np.array([(p, q) for mm, p, q in starts if mm == m])
        sol, ok = _newton(E, batch, m, cap, polish_step, newton_iters)
        failures += int((~ok).sum())
        solved.extend((m, p, q) for (p, q), good in zip(sol, ok) if good)
    sol = np.array([(m, p, q) for m, p, q in solved if min(q, np.pi - q) >= 1e-4]).reshape(-1, 3)
    # psi near 0 or pi runs along the equator, which the psi = 0 branch covers
    if len(sol):
        ms = sol[:, 0].astype(int)
        ph1, ps1, s1, _, _ = _upcrossings(E, sol[:, 1], sol[:, 2], int(ms.max()), cap * 1.05, polish_step)
        prime = ms.copy()
        for k in range(int(ms.max()) - 1, 0, -1):
            res = np.linalg.norm(_residual(sol[:, 1], sol[:, 2], ph1[k - 1], ps1[k - 1]), axis=1)
            prime = np.where((ms % k == 0) & (res < 1e-7), k, prime)
        length = s1[prime - 1, np.arange(len(sol))]
        good = np.isfinite(length)
        good[good] = _closure(E, sol[good, 1], sol[good, 2], length[good], polish_step) < closure_tol
        failures += int((~good).sum())
        for (_, p, q), L, keep in zip(sol, length, good):
            if not keep:
                continue
            if E.is_sphere:
                hit = next((i for i, h in enumerate(found) if abs(h.prime_length - L) <= 1e-6), None)
                if hit is not None:
                    counts[hit] += 1
                    continue
            g = ClosedGeodesic(_trace(E, p, q, float(L), polish_step), E, 1)
            if E.is_sphere or not any(_close(g, h) for h in found):
                found.append(g)
                counts.append(1)
    classes, sizes = [], []
    for g, cnt in zip(found, counts):
        for c, rep in enumerate(classes):
            if _same_class(E, g, rep):
                sizes[c] += cnt
                break
        else:
            classes.append(g)
            sizes.append(cnt)
    classes = [_labeled(g) for g in classes]
    covers = []
    for g in classes:
        r = 1
        while r * g.prime_length <= cap:
            covers.append(g.cover(r))
            r += 1
    return SearchReport(tuple(covers), tuple(classes), tuple(sizes), len(P) + 1,
                        len(starts), failures)


def _labeled(g: ClosedGeodesic) -> ClosedGeodesic:
    """Name a geodesic lying in a coordinate plane x_i = 0 as gamma_i."""
    if g.surface.is_sphere:
        return ClosedGeodesic(g.curve, g.surface, g.covering, "great circle")
    spread = np.abs(g.curve.vertices).max(0)
    planar = np.flatnonzero(spread < 1e-6)
    label = f"gamma{planar[0] + 1}" if planar.size == 1 else "other"
    return ClosedGeodesic(g.curve, g.surface, g.covering, label)


def _close(g, h, tol=1e-3) -> bool:
    p = g.curve.vertices[:: max(1, len(g.curve.vertices) // 256)]
    q = h.curve.vertices[:: max(1, len(h.curve.vertices) // 256)]
    return _hausdorff(p, q) < tol


def _newton(E, x0, m, cap, step, iters, fd=1e-6):
    """Damped Newton on F(phi, psi) = P^m(phi, psi) - (phi, psi), batched."""
    x = np.array(x0, float)
    n = len(x)

    def F(z):
        ph, ps, sl, _, _ = _upcrossings(E, z[:, 0], z[:, 1], m, cap * 1.05, step)
        r = _residual(z[:, 0], z[:, 1], ph[m - 1], ps[m - 1])
        r[~np.isfinite(sl[m - 1])] = np.nan
        return r

    f = F(x)
    done = np.linalg.norm(f, axis=1) < 1e-11
    for _ in range(iters):
        act = np.flatnonzero(~done & np.isfinite(f).all(1))
        if not act.size:
            break
        xa = x[act]
        fa = f[act]
        J = np.empty((act.size, 2, 2))
        for k in range(2):
            e = np.zeros(2)
            e[k] = fd
            J[:, :, k] = (F(xa + e) - F(xa - e)) / (2 * fd)
        dx = np.stack([np.linalg.lstsq(J[i], -fa[i], rcond=1e-12)[0] for i in range(act.size)])
        lam = np.ones(act.size)
        best = np.linalg.norm(fa, axis=1)
        trial_x = xa.copy()
        trial_f = fa.copy()
        pending = np.ones(act.size, dtype=bool)
        for _ in range(6):
            idx = np.flatnonzero(pending)
            if not idx.size:
                break
            cand = xa[idx] + lam[idx, None] * dx[idx]
            cand[:, 1] = np.clip(cand[:, 1], 1e-6, np.pi - 1e-6)
            fc = F(cand)
            nc = np.linalg.norm(fc, axis=1)
            good = np.isfinite(nc) & (nc < best[idx])
            trial_x[idx[good]] = cand[good]
            trial_f[idx[good]] = fc[good]
            pending[idx[good]] = False
            lam[idx[~good]] *= 0.5
        x[act] = trial_x
        f[act] = trial_f
        stalled = act[pending]
        done[stalled] = True  # no decrease: give up on these
        done |= np.linalg.norm(f, axis=1) < 1e-11
    ok = np.isfinite(f).all(1) & (np.linalg.norm(f, axis=1) < 1e-8)
    x[:, 0] = np.mod(x[:, 0], 2 * np.pi)
    return x, ok
