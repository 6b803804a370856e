"""Certified root counting for real trigonometric polynomials on [0, 2pi).

A trigonometric polynomial of degree d,

    f(t) = a_0 + sum_j a_j cos(j t) + b_j sin(j t),

has at most 2d roots per period. Roots are isolated by interval subdivision
using the derivative bounds sum j^m (|a_j| + |b_j|): an interval is discarded
when |f(mid)| exceeds the first-derivative bound times its half-width, and
settled when f' provably keeps its sign (then it holds a root iff the end
values differ in sign). Everything is vectorized over a batch of polynomials.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2 * np.pi


def trig_coefficients(values: np.ndarray, degree: int):
    """Cosine/sine coefficients from ``N >= 2 * degree + 1`` equispaced samples per row."""
    values = np.atleast_2d(values)
    n = values.shape[1]
    if n < 2 * degree + 1:
        raise ValueError("not enough samples for the degree")
    c = np.fft.rfft(values, axis=1) / n
    a = 2 * c.real[:, : degree + 1]
    b = -2 * c.imag[:, : degree + 1]
    a[:, 0] /= 2
    b[:, 0] = 0.0
    return a, b


def _basis(t, degree):
    j = np.arange(degree + 1)
    jt = t[..., None] * j
    return j, np.cos(jt), np.sin(jt)


def trig_eval(a, b, t, derivative: int = 0):
    """Evaluate row-wise: ``a``, ``b`` (K, d+1) against ``t`` (K,) or (K, M)."""
    a = np.asarray(a)
    b = np.asarray(b)
    t = np.asarray(t, dtype=float)
    j, c, s = _basis(t, a.shape[-1] - 1)
    if t.ndim == 2:
        a, b = a[:, None, :], b[:, None, :]
    if derivative == 0:
        return (a * c + b * s).sum(-1)
    if derivative == 1:
        return (j * (b * c - a * s)).sum(-1)
    if derivative == 2:
        return (-(j**2) * (a * c + b * s)).sum(-1)
    raise ValueError("derivative must be 0, 1 or 2")


@dataclass(frozen=True)
class Isolation:
    counts: np.ndarray  # roots per polynomial (-1 where isolation failed)
    failed: np.ndarray  # bool per polynomial
    owner: np.ndarray  # polynomial index of each isolating interval
    lo: np.ndarray
    hi: np.ndarray


def isolate_roots(a, b, initial: int = 16, max_depth: int = 40) -> Isolation:
    """Isolate all roots in [0, 2pi) of each polynomial in the batch."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    npoly, deg1 = a.shape
    j = np.arange(deg1)
    L1 = (j * (np.abs(a) + np.abs(b))).sum(1)
    L2 = (j**2 * (np.abs(a) + np.abs(b))).sum(1)
    edges = np.linspace(0.0, TWO_PI, initial + 1)
    owner = np.repeat(np.arange(npoly), initial)
    lo = np.tile(edges[:-1], npoly)
    hi = np.tile(edges[1:], npoly)
    counts = np.zeros(npoly, dtype=int)
    failed = np.zeros(npoly, dtype=bool)
    found_owner, found_lo, found_hi = [], [], []
    for depth in range(max_depth + 1):
        if not owner.size:
            break
        mid = 0.5 * (lo + hi)
        w = 0.5 * (hi - lo)
        ao, bo = a[owner], b[owner]
        fm = trig_eval(ao, bo, mid)
        dm = trig_eval(ao, bo, mid, 1)
        empty = np.abs(fm) > L1[owner] * w
        mono = ~empty & (np.abs(dm) > L2[owner] * w)
        if mono.any():
            flo = trig_eval(ao[mono], bo[mono], lo[mono])
            # 2pi and 0 are one point; evaluate it once so a root there counts once
            fhi = trig_eval(ao[mono], bo[mono], np.mod(hi[mono], TWO_PI))
            root = (flo > 0) != (fhi > 0)
            idx = np.flatnonzero(mono)[root]
            np.add.at(counts, owner[idx], 1)
            found_owner.append(owner[idx])
            found_lo.append(lo[idx])
            found_hi.append(hi[idx])
        rest = ~empty & ~mono
        owner, lo, hi, mid = owner[rest], lo[rest], hi[rest], mid[rest]
        if depth == max_depth:
            failed[owner] = True
            break
        owner = np.repeat(owner, 2)
        lo, hi = np.stack([lo, mid], 1).ravel(), np.stack([mid, hi], 1).ravel()
    counts = np.where(failed, -1, counts)
    cat = lambda xs, dt=float: np.concatenate(xs) if xs else np.zeros(0, dtype=dt)
    fo = cat(found_owner, int)
    keep = ~failed[fo] if fo.size else np.zeros(0, dtype=bool)
    return Isolation(counts, failed, fo[keep], cat(found_lo)[keep], cat(found_hi)[keep])


def trig_roots(a, b, bisections: int = 30) -> np.ndarray:
    """All roots in [0, 2pi) of a single trigonometric polynomial, sorted.

    Isolating intervals are narrowed by bisection and finished with one
    Newton step. Raises if a root cannot be isolated (e.g. a double root).
    """
    a = np.atleast_2d(np.asarray(a, float))
    b = np.atleast_2d(np.asarray(b, float))
    iso = isolate_roots(a, b)
    if iso.failed[0]:
        raise ArithmeticError("root isolation failed (multiple root?)")
    lo, hi = iso.lo.copy(), iso.hi.copy()
    if not lo.size:
        return lo
    A = np.repeat(a, lo.size, 0)
    B = np.repeat(b, lo.size, 0)
    flo = trig_eval(A, B, lo)
    for _ in range(bisections):
        mid = 0.5 * (lo + hi)
        fm = trig_eval(A, B, mid)
        same = (fm > 0) == (flo > 0)
        lo = np.where(same, mid, lo)
        flo = np.where(same, fm, flo)
        hi = np.where(same, hi, mid)
    t = 0.5 * (lo + hi)
    d = trig_eval(A, B, t, 1)
    t = t - trig_eval(A, B, t) / np.where(d != 0, d, 1.0)
    return np.sort(np.mod(t, TWO_PI))
