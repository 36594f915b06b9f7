"""Planar filtrations: Delaunay/alpha and Vietoris-Rips.

Predicates use a floating-point filter with an exact rational fallback.
Cocircular configurations are resolved by symbolically lowering each point's
paraboloid lift by an amount that dominates for lexicographically smaller
points, which makes the triangulation unique and prefers the diagonal through
the lexicographically smallest point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .complex import SimplicialComplex, build_complex

_EPS = 2.0 ** -53
_CCW_BOUND = (3.0 + 16.0 * _EPS) * _EPS
_ICC_BOUND = (10.0 + 96.0 * _EPS) * _EPS


class GeometryError(ValueError):
    pass


class Collinear(GeometryError):
    pass


class DuplicatePoints(GeometryError):
    pass


@dataclass
class GeometricRealization:
    """Vertex positions; ``coords[i]`` is the position of ``vertices[i]``."""

    vertices: tuple
    coords: np.ndarray

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=np.float64)
        self._row = {v: i for i, v in enumerate(self.vertices)}

    def position(self, v) -> np.ndarray:
        return self.coords[self._row[v]]

    def as_vector(self) -> np.ndarray:
        return self.coords.reshape(-1).copy()

    def with_vector(self, y) -> "GeometricRealization":
        y = np.asarray(y, dtype=np.float64)
        return GeometricRealization(self.vertices, y.reshape(self.coords.shape))

    @property
    def d(self) -> int:
        return self.coords.shape[1]


def orient2d(a, b, c) -> int:
    """Sign of the signed area of (a, b, c); +1 for counter-clockwise."""
    detleft = (a[0] - c[0]) * (b[1] - c[1])
    detright = (a[1] - c[1]) * (b[0] - c[0])
    det = detleft - detright
    if abs(det) > _CCW_BOUND * (abs(detleft) + abs(detright)):
        return 1 if det > 0 else -1
    ax, ay, bx, by, cx, cy = (Fraction(v) for v in (a[0], a[1], b[0], b[1], c[0], c[1]))
    e = (ax - cx) * (by - cy) - (ay - cy) * (bx - cx)
    return (e > 0) - (e < 0)


def _incircle_float(a, b, c, d):
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    t1 = bdx * cdy - cdx * bdy
    t2 = cdx * ady - adx * cdy
    t3 = adx * bdy - bdx * ady
    det = alift * t1 + blift * t2 + clift * t3
    perm = alift * (abs(bdx * cdy) + abs(cdx * bdy)) + blift * (abs(cdx * ady) + abs(adx * cdy)) + clift * (
        abs(adx * bdy) + abs(bdx * ady)
    )
    return det, perm


def _det3(m):
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def incircle(a, b, c, d, ranks=None) -> int:
    """+1 if ``d`` lies inside the circle through counter-clockwise ``a, b, c``.

    With ``ranks`` (lexicographic ranks of the four points) an exact zero is
    resolved by the symbolic lift perturbation, so the result is never 0 for
    distinct points.
    """
    det, perm = _incircle_float(a, b, c, d)
    if abs(det) > _ICC_BOUND * perm:
        return 1 if det > 0 else -1
    pts = [tuple(Fraction(v) for v in p) for p in (a, b, c, d)]
    px, py = pts[3]
    rows = [(x - px, y - py) for x, y in pts[:3]]
    lifts = [x * x + y * y for x, y in rows]
    exact = (
        lifts[0] * (rows[1][0] * rows[2][1] - rows[2][0] * rows[1][1])
        + lifts[1] * (rows[2][0] * rows[0][1] - rows[0][0] * rows[2][1])
        + lifts[2] * (rows[0][0] * rows[1][1] - rows[1][0] * rows[0][1])
    )
    if exact != 0 or ranks is None:
        return (exact > 0) - (exact < 0)
    # The translated form equals det[x, y, x^2+y^2, 1]. Lowering lift i by an
    # infinitesimal delta_i changes it by -delta_i * C_i (C_i the cofactor of
    # lift i); the smallest rank dominates.
    full = [(x, y, x * x + y * y) for x, y in pts]
    for i in sorted(range(4), key=lambda t: ranks[t]):
        others = [full[j] for j in range(4) if j != i]
        minor = _det3([[o[0], o[1], 1] for o in others])
        cof = (-1) ** (i + 2) * minor
        if cof != 0:
            return 1 if cof < 0 else -1
    return 0


def _segment_contains(a, b, p) -> bool:
    """p strictly inside segment ab (p assumed collinear)."""
    return (p[0] - a[0]) * (p[0] - b[0]) + (p[1] - a[1]) * (p[1] - b[1]) < 0


class _Triangulation:
    """Bowyer-Watson with ghost triangles; vertex -1 is the ghost."""

    GHOST = -1

    def __init__(self, pts, ranks):
        self.pts = pts
        self.ranks = ranks
        self.tris = {}
        self.edge = {}
        self._next = 0
        self.last = None

    def _add(self, a, b, c):
        t = self._next
        self._next += 1
        self.tris[t] = (a, b, c)
        self.edge[(a, b)] = t
        self.edge[(b, c)] = t
        self.edge[(c, a)] = t
        if c != self.GHOST:
            self.last = t
        return t

    def _remove(self, t):
        a, b, c = self.tris.pop(t)
        for e in ((a, b), (b, c), (c, a)):
            if self.edge.get(e) == t:
                del self.edge[e]

    def _bad(self, t, p) -> bool:
        a, b, c = self.tris[t]
        P = self.pts
        if c == self.GHOST:
            o = orient2d(P[a], P[b], P[p])
            if o > 0:
                return True
            return o == 0 and _segment_contains(P[a], P[b], P[p])
        r = self.ranks
        return incircle(P[a], P[b], P[c], P[p], (r[a], r[b], r[c], r[p])) > 0

    def start(self, i, j, k):
        if orient2d(self.pts[i], self.pts[j], self.pts[k]) < 0:
            j, k = k, j
        G = self.GHOST
        self._add(i, j, k)
        self._add(j, i, G)
        self._add(k, j, G)
        self._add(i, k, G)

    def _locate(self, p):
        P = self.pts
        t = self.last
        for _ in range(4 * len(self.tris) + 10):
            a, b, c = self.tris[t]
            if c == self.GHOST:
                return t
            for u, v in ((a, b), (b, c), (c, a)):
                if orient2d(P[u], P[v], P[p]) < 0:
                    t = self.edge[(v, u)]
                    break
            else:
                return t
        # walk did not settle; fall back to a scan
        for t in self.tris:
            if self._bad(t, p):
                return t
        raise GeometryError("point location failed")

    def insert(self, p):
        seed = self._locate(p)
        if not self._bad(seed, p):
            for t in self.tris:
                if self._bad(t, p):
                    seed = t
                    break
        bad = {seed}
        stack = [seed]
        boundary = []
        while stack:
            t = stack.pop()
            a, b, c = self.tris[t]
            for u, v in ((a, b), (b, c), (c, a)):
                nb = self.edge.get((v, u))
                if nb in bad:
                    continue
                if nb is not None and self._bad(nb, p):
                    bad.add(nb)
                    stack.append(nb)
                else:
                    boundary.append((u, v))
        # a neighbour could be added to ``bad`` after its shared edge was
        # recorded as boundary
        boundary = [(u, v) for (u, v) in boundary if self.edge.get((v, u)) not in bad]
        for t in bad:
            self._remove(t)
        G = self.GHOST
        for u, v in boundary:
            if u == G:
                self._add(v, p, G)
            elif v == G:
                self._add(p, u, G)
            else:
                self._add(u, v, p)

    def triangles(self):
        return sorted(tuple(sorted(t)) for t in self.tris.values() if self.GHOST not in t)


def delaunay2d(points) -> tuple[SimplicialComplex, GeometricRealization]:
    """Delaunay triangulation of a planar point set as a 2-complex.

    Vertex ids are input row indices; the total order lists vertices, then
    edges, then triangles, each lexicographically.
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise GeometryError("expected an (n, 2) array of points")
    n = len(pts)
    if n < 3:
        raise Collinear("need at least 3 points")
    if not np.all(np.isfinite(pts)):
        raise GeometryError("non-finite coordinates")
    lex = sorted(range(n), key=lambda i: (pts[i, 0], pts[i, 1]))
    for i, j in zip(lex, lex[1:]):
        if pts[i, 0] == pts[j, 0] and pts[i, 1] == pts[j, 1]:
            raise DuplicatePoints(f"points {i} and {j} coincide")
    ranks = [0] * n
    for r, i in enumerate(lex):
        ranks[i] = r
    P = [(float(x), float(y)) for x, y in pts]
    a, b = lex[0], lex[1]
    third = next((c for c in lex[2:] if orient2d(P[a], P[b], P[c]) != 0), None)
    if third is None:
        raise Collinear("all points are collinear")
    tri = _Triangulation(P, ranks)
    tri.start(a, b, third)
    for p in lex[2:]:
        if p != third:
            tri.insert(p)
    triangles = tri.triangles()
    edges = sorted({e for t in triangles for e in combinations(t, 2)})
    simplices = [[i] for i in range(n)] + [list(e) for e in edges] + [list(t) for t in triangles]
    return build_complex(simplices), GeometricRealization(tuple(range(n)), pts)


def circumradius_sq(a, b, c) -> float:
    ax, ay = a
    bx, by = b[0] - ax, b[1] - ay
    cx, cy = c[0] - ax, c[1] - ay
    d = 2.0 * (bx * cy - by * cx)
    ux = (cy * (bx * bx + by * by) - by * (cx * cx + cy * cy)) / d
    uy = (bx * (cx * cx + cy * cy) - cx * (bx * bx + by * by)) / d
    return ux * ux + uy * uy


def alpha_weights(complex: SimplicialComplex, realization: GeometricRealization) -> np.ndarray:
    """Alpha filtration values (squared radii) on a planar Delaunay complex.

    Vertices get 0, triangles their squared circumradius, Gabriel edges their
    squared half-length, and other edges the smallest value among their
    incident triangles. The Gabriel test counts points on the diametral
    circle as inside.
    """
    w = np.zeros(complex.k, dtype=np.float64)
    X = realization.coords
    row = {v: i for i, v in enumerate(realization.vertices)}
    cofaces = {}
    for s in complex.simplices:
        if s.dim == 2:
            a, b, c = (X[row[v]] for v in s.vertices)
            w[s.order_index] = circumradius_sq(a, b, c)
            for f in complex.faces[s.order_index]:
                cofaces.setdefault(f, []).append(s.order_index)
    for s in complex.simplices:
        if s.dim != 1:
            continue
        i, j = row[s.vertices[0]], row[s.vertices[1]]
        mid = 0.5 * (X[i] + X[j])
        r2 = 0.25 * float(np.sum((X[i] - X[j]) ** 2))
        d2 = np.sum((X - mid) ** 2, axis=1)
        d2[[i, j]] = np.inf
        if np.any(d2 <= r2) and s.order_index in cofaces:
            w[s.order_index] = min(w[t] for t in cofaces[s.order_index])
        else:
            w[s.order_index] = r2
    return w


def rips_complex(points, max_dim: int = 2, threshold: float = math.inf):
    """Vietoris-Rips complex with simplex weight = largest pairwise distance."""
    if max_dim > 2:
        raise ValueError("max_dim must be at most 2")
    pts = np.asarray(points, dtype=np.float64)
    n = len(pts)
    dist = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
    simplices = [[i] for i in range(n)]
    weights = [0.0] * n
    if max_dim >= 1:
        adj = dist <= threshold
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if adj[i, j]]
        simplices += [list(e) for e in edges]
        weights += [float(dist[i, j]) for i, j in edges]
        if max_dim >= 2:
            for i, j in edges:
                for k in range(j + 1, n):
                    if adj[i, k] and adj[j, k]:
                        simplices.append([i, j, k])
                        weights.append(float(max(dist[i, j], dist[i, k], dist[j, k])))
    return build_complex(simplices), np.array(weights), GeometricRealization(tuple(range(n)), pts)
