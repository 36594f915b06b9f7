"""Pure-Python kernels. ``_core.pyx`` mirrors this module function for function."""
from __future__ import annotations

import math


def reduce_columns(columns):
    """Standard left-to-right Z/2 column reduction.

    ``columns`` are strictly increasing row-index lists. Returns ``(R, V, low)``
    where ``low[j]`` is the pivot row of reduced column ``j`` or -1.
    """
    n = len(columns)
    R = [list(c) for c in columns]
    V = [[j] for j in range(n)]
    low = [-1] * n
    owner = {}
    for j in range(n):
        col = R[j]
        vj = V[j]
        while col:
            i = owner.get(col[-1])
            if i is None:
                break
            col = sorted(set(col).symmetric_difference(R[i]))
            vj = sorted(set(vj).symmetric_difference(V[i]))
        R[j] = col
        V[j] = vj
        if col:
            low[j] = col[-1]
            owner[col[-1]] = j
    return R, V, low


def _cell(v, lo, h, g):
    i = int(math.floor((v - lo) / h))
    if i < 0:
        return 0
    if i >= g:
        return g - 1
    return i


def segment_cells(x0, y0, x1, y1, lo, h, g):
    """Length fractions of segment (x0,y0)-(x1,y1) per cell of a g x g grid
    with origin ``lo`` and cell width ``h``. Returns ``{flat_index: fraction}``
    with ``flat_index = iy * g + ix``; parts outside the region are dropped."""
    hi = lo + g * h
    dx = x1 - x0
    dy = y1 - y0
    t0, t1 = 0.0, 1.0
    # Liang-Barsky clip to the region
    for p, q in ((-dx, x0 - lo), (dx, hi - x0), (-dy, y0 - lo), (dy, hi - y0)):
        if p == 0.0:
            if q < 0.0:
                return {}
        else:
            r = q / p
            if p < 0.0:
                if r > t1:
                    return {}
                if r > t0:
                    t0 = r
            else:
                if r < t0:
                    return {}
                if r < t1:
                    t1 = r
    if t1 <= t0:
        return {}
    ts = [t0, t1]
    for d, start in ((dx, x0), (dy, y0)):
        if d == 0.0:
            continue
        for i in range(1, g):
            t = (lo + i * h - start) / d
            if t0 < t < t1:
                ts.append(t)
    ts.sort()
    out = {}
    for a, b in zip(ts, ts[1:]):
        dt = b - a
        if dt <= 0.0:
            continue
        tm = 0.5 * (a + b)
        ix = _cell(x0 + tm * dx, lo, h, g)
        iy = _cell(y0 + tm * dy, lo, h, g)
        key = iy * g + ix
        out[key] = out.get(key, 0.0) + dt
    return out


def _clip(poly, axis, c, keep_greater):
    out = []
    n = len(poly)
    if n == 0:
        return out
    px, py = poly[-1]
    pv = (px if axis == 0 else py) - c
    pin = pv >= 0.0 if keep_greater else pv <= 0.0
    for qx, qy in poly:
        qv = (qx if axis == 0 else qy) - c
        qin = qv >= 0.0 if keep_greater else qv <= 0.0
        if qin != pin:
            t = pv / (pv - qv)
            if axis == 0:
                out.append((c, py + t * (qy - py)))
            else:
                out.append((px + t * (qx - px), c))
        if qin:
            out.append((qx, qy))
        px, py, pv, pin = qx, qy, qv, qin
    return out


def _area(poly):
    s = 0.0
    n = len(poly)
    for i in range(n):
        x0, y0 = poly[i]
        x1, y1 = poly[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * abs(s)


def triangle_cells(ax, ay, bx, by, cx, cy, lo, h, g):
    """Area fractions of a non-degenerate triangle per grid cell."""
    total = 0.5 * abs((bx - ax) * (cy - ay) - (cx - ax) * (by - ay))
    out = {}
    if total == 0.0:
        return out
    poly = [(ax, ay), (bx, by), (cx, cy)]
    ix0 = max(0, int(math.floor((min(ax, bx, cx) - lo) / h)))
    ix1 = min(g - 1, int(math.floor((max(ax, bx, cx) - lo) / h)))
    iy0 = max(0, int(math.floor((min(ay, by, cy) - lo) / h)))
    iy1 = min(g - 1, int(math.floor((max(ay, by, cy) - lo) / h)))
    for ix in range(ix0, ix1 + 1):
        xa = lo + ix * h
        strip = _clip(_clip(poly, 0, xa, True), 0, xa + h, False)
        if len(strip) < 3:
            continue
        for iy in range(iy0, iy1 + 1):
            ya = lo + iy * h
            cell = _clip(_clip(strip, 1, ya, True), 1, ya + h, False)
            if len(cell) < 3:
                continue
            a = _area(cell)
            if a > 0.0:
                out[iy * g + ix] = a / total
    return out
