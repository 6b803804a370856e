"""Plain-text dumps of curves, varifolds, networks and cones.

PolyCurve blocks hold one vertex per line ("x y z") and are separated by a
blank line; a closed curve does not repeat its first vertex. Since the block
itself cannot say whether it is closed, readers take a flag for that.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .cone import ConeVarifold
from .curves import Cycle1, PolyCurve, Varifold1
from .network import GeodesicNetwork, Incidence, Junction
from .surface import EllipsoidParams, project_to_surface, project_to_tangent


def _fmt(x) -> str:
    return " ".join("%.17g" % v for v in x)


def _block(c: PolyCurve) -> str:
    return "\n".join(_fmt(v) for v in c.vertices)


def dump_curves(curves, path=None) -> str:
    """PolyCurves (or a Cycle1) in the shared dump format."""
    if isinstance(curves, Cycle1):
        curves = curves.curves
    text = "\n\n".join(_block(c) for c in curves) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def _blocks(text: str):
    block = []
    for line in text.splitlines():
        if line.strip():
            block.append(line)
        elif block:
            yield block
            block = []
    if block:
        yield block


def load_curves(source, closed: bool = True) -> list[PolyCurve]:
    text = _read(source)
    return [PolyCurve(np.array([[float(t) for t in ln.split()] for ln in b]), closed=closed)
            for b in _blocks(text)]


def _read(source) -> str:
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source
                                    and Path(source).exists()):
        return Path(source).read_text()
    return source


def dump_varifold(V: Varifold1, path=None) -> str:
    """Each curve block preceded by "mult k"."""
    parts = [f"mult {m}\n{_block(c)}" for c, m in V.pieces]
    text = "\n\n".join(parts) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def load_varifold(source, closed: bool = True) -> Varifold1:
    pieces = []
    for b in _blocks(_read(source)):
        head = b[0].split()
        if head[0] != "mult":
            raise ValueError(f"expected 'mult k', got {b[0]!r}")
        pts = np.array([[float(t) for t in ln.split()] for ln in b[1:]])
        pieces.append((PolyCurve(pts, closed=closed), int(head[1])))
    return Varifold1(tuple(pieces))


def _end_flag(curve: PolyCurve, b: Incidence, point) -> int:
    """+1 at the first vertex, -1 at the last, 0 where the segment passes through."""
    if curve.closed:
        return 0
    v = curve.vertices
    if np.linalg.norm(v[0] - point) < 1e-8:
        return 1
    if np.linalg.norm(v[-1] - point) < 1e-8:
        return -1
    return 0


def _arc_seglen(vertices, closed: bool, E: EllipsoidParams) -> np.ndarray:
    """Geodesic length of each segment: chord c times 1 + (kappa c)^2 / 24."""
    v = np.asarray(vertices, float)
    nxt = np.roll(v, -1, axis=0) if closed else v[1:]
    cur = v if closed else v[:-1]
    d = nxt - cur
    c = np.linalg.norm(d, axis=1)
    mid = project_to_surface(0.5 * (cur + nxt), E)
    kappa = E.normal_curvature(mid, d / c[:, None])
    return c * (1 + (kappa * c) ** 2 / 24)


def _unit(v):
    return v / np.linalg.norm(v)


def dump_network(N: GeodesicNetwork, path=None) -> str:
    """Network file: surface header, segments, then junctions with incident lines.

    A segment passing through a junction is listed once with end flag 0; its
    two half-branches are restored on reading. Closed segments carry the
    keyword "closed" after their multiplicity.
    """
    a = N.surface.a
    lines = [f"surface {_fmt(a)}"]
    for sid, (c, m) in enumerate(N.pieces):
        lines.append(f"segment {sid} mult {m}" + (" closed" if c.closed else ""))
        lines.append(_block(c))
        lines.append("")
    for j in N.junctions:
        lines.append(f"junction {_fmt(j.point)}")
        seen = set()
        for b in j.incident:
            c = N.pieces[b.segment][0]
            flag = _end_flag(c, b, j.point)
            if flag == 0:
                if b.segment in seen:
                    continue
                seen.add(b.segment)
            lines.append(f"incident {b.segment} {flag:+d}")
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def load_network(source) -> GeodesicNetwork:
    """Inverse of dump_network; arc lengths and tangents are rebuilt from the vertices."""
    from .network import incidence_at

    lines = _read(source).splitlines()
    surface = None
    pieces: list = []
    junctions = []
    i = 0
    while i < len(lines):
        tok = lines[i].split()
        i += 1
        if not tok:
            continue
        if tok[0] == "surface":
            surface = EllipsoidParams(*map(float, tok[1:4]))
        elif tok[0] == "segment":
            sid, mult, closed = int(tok[1]), int(tok[3]), "closed" in tok[4:]
            pts = []
            while i < len(lines) and lines[i].strip():
                pts.append([float(t) for t in lines[i].split()])
                i += 1
            if sid != len(pieces):
                raise ValueError("segments must be listed in id order")
            if surface is None:
                raise ValueError("surface header must precede segments")
            pts = np.array(pts)
            pieces.append((PolyCurve(pts, closed, _arc_seglen(pts, closed, surface)), mult))
        elif tok[0] == "junction":
            p = np.array([float(t) for t in tok[1:4]])
            inc = []
            while i < len(lines) and lines[i].startswith("incident"):
                _, sid, flag = lines[i].split()
                i += 1
                # tangents are re-derived from the vertices, so pin them to the tangent plane
                branches = [Incidence(b.segment, _unit(project_to_tangent(p, b.tangent, surface)),
                                      b.multiplicity) for b in incidence_at(pieces, int(sid), p)]
                if int(flag) != 0 and len(branches) != 1:
                    raise ValueError(f"segment {sid} does not end at {p}")
                inc.extend(branches)
            junctions.append(Junction(p, tuple(inc), surface))
        else:
            raise ValueError(f"unrecognized line {lines[i - 1]!r}")
    if surface is None:
        raise ValueError("missing surface header")
    return GeodesicNetwork(tuple(pieces), tuple(junctions), surface)


def dump_cone(C: ConeVarifold, path=None) -> str:
    """One "tri x1 y1 z1 x2 y2 z2 x3 y3 z3 mult k" line per triangle."""
    lines = [f"tri {_fmt(t.ravel())} mult {int(m)}" for t, m in zip(C.triangles, C.multiplicity)]
    text = "\n".join(lines) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text
