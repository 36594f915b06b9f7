"""Spreading per-simplex heat over a square grid of cells.

Cell ``(ix, iy)`` covers ``[lo + ix*h, lo + (ix+1)*h) x [lo + iy*h, ...)``
(the last row/column is closed) and has flat index ``iy * g + ix``. In the
CSV form ``row`` is ``iy`` and ``col`` is ``ix``; images are written with
``iy`` increasing upwards.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import _backend
from .complex import SimplicialComplex
from .geometry import GeometricRealization
from .heatmap import ChainSelector, HeatmapWeights, WeightFunction, heatmap
from .persistence import persistence_diagram


@dataclass(frozen=True)
class RasterGrid:
    lo: float
    hi: float
    g: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError("lo must be below hi")
        if self.g < 1:
            raise ValueError("need at least one cell per side")

    @property
    def h(self) -> float:
        return (self.hi - self.lo) / self.g

    @property
    def m(self) -> int:
        return self.g * self.g

    def cell(self, ix: int, iy: int) -> int:
        return iy * self.g + ix

    def cell_box(self, flat: int) -> tuple:
        iy, ix = divmod(flat, self.g)
        h = self.h
        return (self.lo + ix * h, self.lo + (ix + 1) * h, self.lo + iy * h, self.lo + (iy + 1) * h)

    def contains(self, p) -> bool:
        return all(self.lo <= c <= self.hi for c in p)


def _closed_cells(v: float, grid: RasterGrid) -> list:
    f = math.floor((v - grid.lo) / grid.h)
    h = grid.h
    return [i for i in (f - 1, f) if 0 <= i < grid.g and grid.lo + i * h <= v <= grid.lo + (i + 1) * h]


def _vertex_fractions(p, grid: RasterGrid) -> dict:
    xs = _closed_cells(float(p[0]), grid)
    ys = _closed_cells(float(p[1]), grid)
    n = len(xs) * len(ys)
    return {grid.cell(ix, iy): 1.0 / n for iy in ys for ix in xs}


def _edge_fractions(a, b, grid: RasterGrid) -> dict:
    if a[0] == b[0] and a[1] == b[1]:
        return _vertex_fractions(a, grid)
    return _backend.segment_cells(float(a[0]), float(a[1]), float(b[0]), float(b[1]), grid.lo, grid.h, grid.g)


def _triangle_fractions(a, b, c, grid: RasterGrid) -> dict:
    area2 = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])
    if area2 == 0.0:
        # collinear: the realisation is its longest side
        sides = [(a, b), (b, c), (a, c)]
        p, q = max(sides, key=lambda s: (s[0][0] - s[1][0]) ** 2 + (s[0][1] - s[1][1]) ** 2)
        return _edge_fractions(p, q, grid)
    return _backend.triangle_cells(
        float(a[0]), float(a[1]), float(b[0]), float(b[1]), float(c[0]), float(c[1]), grid.lo, grid.h, grid.g
    )


def pi_simplex(positions, grid: RasterGrid) -> dict:
    """Fractions ``{flat_cell: share}`` of one simplex given its vertex
    positions; zero-measure realisations use the lower-dimensional rule."""
    pts = [np.asarray(p, dtype=np.float64) for p in positions]
    if any(len(p) != 2 for p in pts):
        raise ValueError("only planar realisations are supported")
    if len(pts) == 1:
        return _vertex_fractions(pts[0], grid)
    if len(pts) == 2:
        return _edge_fractions(pts[0], pts[1], grid)
    if len(pts) == 3:
        return _triangle_fractions(pts[0], pts[1], pts[2], grid)
    raise ValueError("simplices above dimension 2 are not rasterised")


def fractions(complex: SimplicialComplex, realization: GeometricRealization, grid: RasterGrid) -> list:
    return [pi_simplex([realization.position(v) for v in s.vertices], grid) for s in complex]


def rasterize(w, complex: SimplicialComplex, realization: GeometricRealization, grid: RasterGrid,
              fracs: Optional[list] = None) -> np.ndarray:
    """heat_i = sum over simplices of w(s) * fraction of s in cell i."""
    if isinstance(w, HeatmapWeights):
        w = w.w
    w = np.asarray(w, dtype=np.float64)
    if len(w) != complex.k:
        raise ValueError(f"{len(w)} weights for {complex.k} simplices")
    heat = np.zeros(grid.m)
    for s, ws in enumerate(w):
        if ws == 0.0:
            continue
        fr = fracs[s] if fracs is not None else pi_simplex(
            [realization.position(v) for v in complex[s].vertices], grid)
        for cell, f in fr.items():
            heat[cell] += ws * f
    return heat


def realization_from(complex: SimplicialComplex, y) -> GeometricRealization:
    if isinstance(y, GeometricRealization):
        return y
    verts = tuple(complex.vertex_ids)
    return GeometricRealization(verts, np.asarray(y, dtype=np.float64).reshape(len(verts), -1))


def theta(x, y, complex: SimplicialComplex, F: WeightFunction, sel, grid: RasterGrid,
          degree: Optional[int] = None) -> np.ndarray:
    """Raster of the heatmap of weights ``x`` placed at positions ``y``."""
    w = np.asarray(x, dtype=np.float64)
    hw = heatmap(persistence_diagram(complex, w), degree, F, ChainSelector(sel), complex.k)
    return rasterize(hw, complex, realization_from(complex, y), grid)


ORANGE = np.array([230.0, 97.0, 1.0])
BLUE = np.array([33.0, 102.0, 172.0])
WHITE = np.array([255.0, 255.0, 255.0])


def _image_rows(heat, g):
    return np.asarray(heat, dtype=np.float64).reshape(g, g)[::-1]


def write_raster_csv(heat, grid: RasterGrid, path) -> None:
    heat = np.asarray(heat, dtype=np.float64)
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["row", "col", "heat"])
        for flat, v in enumerate(heat):
            iy, ix = divmod(flat, grid.g)
            out.writerow([iy, ix, repr(float(v))])


def read_raster_csv(path) -> np.ndarray:
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append((int(rec["row"]), int(rec["col"]), float(rec["heat"])))
    g = max(max(r, c) for r, c, _ in rows) + 1 if rows else 0
    heat = np.zeros(g * g)
    for r, c, v in rows:
        heat[r * g + c] = v
    return heat


def write_raster(heat, grid: RasterGrid, path, style: str = "diverging") -> tuple:
    """Write a PGM (grayscale) or PPM (diverging) image and a companion CSV.

    Grayscale maps the largest value to black and the smallest to white.
    Diverging scales by the largest magnitude: negative to blue, zero white,
    positive to orange. Returns ``(image_path, csv_path)``.
    """
    path = Path(path)
    heat = np.asarray(heat, dtype=np.float64)
    if len(heat) != grid.m:
        raise ValueError(f"{len(heat)} values for a {grid.g}x{grid.g} grid")
    rows = _image_rows(heat, grid.g)
    lines = []
    if style == "grayscale":
        lo, hi = float(heat.min()), float(heat.max())
        span = hi - lo
        level = np.zeros_like(rows) if span == 0 else (rows - lo) / span
        pix = np.rint(255 * (1.0 - level)).astype(int)
        lines = ["P2", f"{grid.g} {grid.g}", "255"]
        lines += [" ".join(str(v) for v in r) for r in pix]
    elif style == "diverging":
        scale = float(np.max(np.abs(heat))) if heat.size else 0.0
        s = np.zeros_like(rows) if scale == 0 else rows / scale
        lines = ["P3", f"{grid.g} {grid.g}", "255"]
        for r in s:
            px = []
            for v in r:
                end = ORANGE if v > 0 else BLUE
                c = np.rint(WHITE + abs(v) * (end - WHITE)).astype(int)
                px.extend(str(int(t)) for t in c)
            lines.append(" ".join(px))
    else:
        raise ValueError(f"unknown style {style!r}")
    path.write_text("\n".join(lines) + "\n")
    csv_path = path.with_suffix(".csv")
    write_raster_csv(heat, grid, csv_path)
    return path, csv_path
