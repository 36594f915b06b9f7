# distutils: language = c++
"""Compiled kernels; same signatures and results as ``_core_py``."""
from libc.math cimport floor, fabs
from libcpp.vector cimport vector


cdef inline void _symdiff(vector[int]& a, const vector[int]& b, vector[int]& out) noexcept nogil:
    cdef size_t i = 0, j = 0
    cdef size_t na = a.size(), nb = b.size()
    out.clear()
    while i < na and j < nb:
        if a[i] < b[j]:
            out.push_back(a[i]); i += 1
        elif b[j] < a[i]:
            out.push_back(b[j]); j += 1
        else:
            i += 1; j += 1
    while i < na:
        out.push_back(a[i]); i += 1
    while j < nb:
        out.push_back(b[j]); j += 1
    a.swap(out)


def reduce_columns(columns):
    cdef int n = len(columns)
    cdef vector[vector[int]] R
    cdef vector[vector[int]] V
    cdef vector[int] owner
    cdef vector[int] low
    cdef vector[int] tmp
    cdef int j, i, p
    R.resize(n)
    V.resize(n)
    owner.assign(n, -1)
    low.assign(n, -1)
    for j in range(n):
        for v in columns[j]:
            R[j].push_back(v)
        V[j].push_back(j)
    with nogil:
        for j in range(n):
            while R[j].size() > 0:
                p = R[j].back()
                i = owner[p]
                if i < 0:
                    break
                _symdiff(R[j], R[i], tmp)
                _symdiff(V[j], V[i], tmp)
            if R[j].size() > 0:
                p = R[j].back()
                low[j] = p
                owner[p] = j
    return [list(c) for c in R], [list(c) for c in V], list(low)


cdef inline int _cell(double v, double lo, double h, int g) noexcept nogil:
    cdef int i = <int>floor((v - lo) / h)
    if i < 0:
        return 0
    if i >= g:
        return g - 1
    return i


def segment_cells(double x0, double y0, double x1, double y1, double lo, double h, int g):
    cdef double hi = lo + g * h
    cdef double dx = x1 - x0, dy = y1 - y0
    cdef double t0 = 0.0, t1 = 1.0, p, q, r, t, a, b, tm
    cdef double ps[4]
    cdef double qs[4]
    cdef int k, i, key
    cdef vector[double] ts
    ps[0] = -dx; qs[0] = x0 - lo
    ps[1] = dx; qs[1] = hi - x0
    ps[2] = -dy; qs[2] = y0 - lo
    ps[3] = dy; qs[3] = hi - y0
    for k in range(4):
        p = ps[k]; q = qs[k]
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
    ts.push_back(t0)
    ts.push_back(t1)
    if dx != 0.0:
        for i in range(1, g):
            t = (lo + i * h - x0) / dx
            if t0 < t < t1:
                ts.push_back(t)
    if dy != 0.0:
        for i in range(1, g):
            t = (lo + i * h - y0) / dy
            if t0 < t < t1:
                ts.push_back(t)
    cdef list tl = sorted(ts)
    out = {}
    for k in range(len(tl) - 1):
        a = tl[k]; b = tl[k + 1]
        if b - a <= 0.0:
            continue
        tm = 0.5 * (a + b)
        key = _cell(y0 + tm * dy, lo, h, g) * g + _cell(x0 + tm * dx, lo, h, g)
        out[key] = out.get(key, 0.0) + (b - a)
    return out


cdef int _clip(double* xs, double* ys, int n, int axis, double c, bint keep_greater,
               double* ox, double* oy) noexcept nogil:
    cdef int m = 0, k
    cdef double px, py, pv, qx, qy, qv, t
    cdef bint pin, qin
    if n == 0:
        return 0
    px = xs[n - 1]; py = ys[n - 1]
    pv = (px if axis == 0 else py) - c
    pin = (pv >= 0.0) if keep_greater else (pv <= 0.0)
    for k in range(n):
        qx = xs[k]; qy = ys[k]
        qv = (qx if axis == 0 else qy) - c
        qin = (qv >= 0.0) if keep_greater else (qv <= 0.0)
        if qin != pin:
            t = pv / (pv - qv)
            if axis == 0:
                ox[m] = c; oy[m] = py + t * (qy - py)
            else:
                ox[m] = px + t * (qx - px); oy[m] = c
            m += 1
        if qin:
            ox[m] = qx; oy[m] = qy
            m += 1
        px = qx; py = qy; pv = qv; pin = qin
    return m


cdef double _area(double* xs, double* ys, int n) noexcept nogil:
    cdef double s = 0.0
    cdef int i, j
    for i in range(n):
        j = i + 1 if i + 1 < n else 0
        s += xs[i] * ys[j] - xs[j] * ys[i]
    return 0.5 * fabs(s)


def triangle_cells(double ax, double ay, double bx, double by, double cx, double cy,
                   double lo, double h, int g):
    cdef double total = 0.5 * fabs((bx - ax) * (cy - ay) - (cx - ax) * (by - ay))
    out = {}
    if total == 0.0:
        return out
    # a triangle clipped by 4 axis-aligned half-planes has at most 7 vertices
    cdef double px[3]
    cdef double py[3]
    cdef double s1x[16]
    cdef double s1y[16]
    cdef double s2x[16]
    cdef double s2y[16]
    cdef double c1x[16]
    cdef double c1y[16]
    cdef double c2x[16]
    cdef double c2y[16]
    cdef int n1, n2, m1, m2, ix, iy
    cdef double xa, ya, a
    px[0] = ax; px[1] = bx; px[2] = cx
    py[0] = ay; py[1] = by; py[2] = cy
    cdef int ix0 = max(0, <int>floor((min(ax, bx, cx) - lo) / h))
    cdef int ix1 = min(g - 1, <int>floor((max(ax, bx, cx) - lo) / h))
    cdef int iy0 = max(0, <int>floor((min(ay, by, cy) - lo) / h))
    cdef int iy1 = min(g - 1, <int>floor((max(ay, by, cy) - lo) / h))
    for ix in range(ix0, ix1 + 1):
        xa = lo + ix * h
        n1 = _clip(px, py, 3, 0, xa, True, s1x, s1y)
        n2 = _clip(s1x, s1y, n1, 0, xa + h, False, s2x, s2y)
        if n2 < 3:
            continue
        for iy in range(iy0, iy1 + 1):
            ya = lo + iy * h
            m1 = _clip(s2x, s2y, n2, 1, ya, True, c1x, c1y)
            m2 = _clip(c1x, c1y, m1, 1, ya + h, False, c2x, c2y)
            if m2 < 3:
                continue
            a = _area(c2x, c2y, m2)
            if a > 0.0:
                out[iy * g + ix] = a / total
    return out
