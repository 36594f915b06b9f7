"""Point cloud to diagram to raster, and averages over freshly sampled clouds.

Cloud ``j`` of a run with seed ``s`` is drawn from the substream
``(s, j)``; results are merged in cloud order, so the worker count never
changes the output.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .datagen import GeneratorSpec, generate
from .geometry import alpha_weights, delaunay2d, rips_complex
from .heatmap import ChainSelector, WeightFunction, heatmap
from .kernels import ExpectedHeatmap, map_ordered, substream, summarize
from .persistence import AnnotatedDiagram, persistence_diagram
from .raster import RasterGrid, rasterize


@dataclass
class CloudResult:
    points: np.ndarray
    complex: object
    realization: object
    weights: np.ndarray
    diagram: AnnotatedDiagram


def filtration(points, kind: str = "alpha", max_dim: int = 2, threshold: float = math.inf):
    """``(complex, weights, realization)`` for an alpha or Rips filtration."""
    if kind == "alpha":
        K, R = delaunay2d(points)
        return K, alpha_weights(K, R), R
    if kind == "rips":
        return rips_complex(points, max_dim, threshold)
    raise ValueError(f"unknown filtration {kind!r}")


def cloud_diagram(points, kind: str = "alpha") -> CloudResult:
    K, w, R = filtration(points, kind)
    return CloudResult(np.asarray(points), K, R, w, persistence_diagram(K, w))


@dataclass
class _DiagramTask:
    spec: GeneratorSpec
    seed: int
    kind: str

    def __call__(self, j):
        pts = generate(self.spec, substream(self.seed, j))
        return cloud_diagram(pts, self.kind).diagram


def sample_diagrams(spec: GeneratorSpec, n_clouds: int, seed: int = 0, kind: str = "alpha",
                    workers: int = 1) -> list:
    return map_ordered(_DiagramTask(spec, seed, kind), range(n_clouds), workers)


def feature_matrix(diagrams, featurizer) -> np.ndarray:
    return np.array([featurizer(dg).flat() for dg in diagrams])


def mean_features(spec: GeneratorSpec, n_clouds: int, featurizer, seed: int = 0, kind: str = "alpha",
                  workers: int = 1) -> np.ndarray:
    """Average feature vector over ``n_clouds`` fresh clouds."""
    X = feature_matrix(sample_diagrams(spec, n_clouds, seed, kind, workers), featurizer)
    return np.array([math.fsum(c) for c in X.T]) / len(X)


@dataclass
class _RasterTask:
    spec: GeneratorSpec
    F: WeightFunction
    sel: ChainSelector
    grid: RasterGrid
    seed: int
    degree: Optional[int]
    kind: str

    def __call__(self, j):
        cr = cloud_diagram(generate(self.spec, substream(self.seed, j)), self.kind)
        hw = heatmap(cr.diagram, self.degree, self.F, self.sel, cr.complex.k)
        heat = rasterize(hw, cr.complex, cr.realization, self.grid)
        return heat, math.fsum(hw.w)


def experiment_expected_phm(spec: GeneratorSpec, n_clouds: int, F: WeightFunction, sel, grid: RasterGrid,
                            seed: int = 0, degree: Optional[int] = 1, kind: str = "alpha",
                            workers: int = 1) -> ExpectedHeatmap:
    """Mean and standard error of the raster over fresh clouds.

    ``meta["mass"]`` is the mean over clouds of the total heat before
    rasterisation; it equals the raster sum when every cloud lies inside
    the grid.
    """
    if n_clouds < 1:
        raise ValueError("n_clouds must be at least 1")
    task = _RasterTask(spec, F, ChainSelector(sel), grid, seed, degree, kind)
    out = map_ordered(task, range(n_clouds), workers)
    mean, se = summarize([h for h, _ in out])
    mass = math.fsum(m for _, m in out) / n_clouds
    return ExpectedHeatmap(mean, se, n_clouds, seed, None, {
        "mass": mass,
        "selector": ChainSelector(sel).value,
        "degree": degree,
        "grid": [grid.lo, grid.hi, grid.g],
        "generator": spec.to_dict(),
    })
