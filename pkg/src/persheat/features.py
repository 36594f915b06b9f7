"""Ordered diagrams and structured feature maps.

Structured vectors carry, per cell, which diagram point produced the value.
``attribution`` uses positions within the structured sequence (-1 for none)
and ``sources`` maps those positions back to indices into
``AnnotatedDiagram.points``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .persistence import AnnotatedDiagram


@dataclass(frozen=True)
class OrderedPoint:
    birth: float
    death: float
    source: int

    @property
    def persistence(self) -> float:
        return self.death - self.birth


@dataclass(frozen=True)
class LandscapeGrid:
    t_min: float
    t_max: float
    n_t: int = 100
    n_levels: int = 10

    def __post_init__(self):
        if not self.t_min < self.t_max:
            raise ValueError("t_min must be below t_max")
        if self.n_t < 2 or self.n_levels < 1:
            raise ValueError("need n_t >= 2 and n_levels >= 1")

    @property
    def ts(self) -> np.ndarray:
        return np.linspace(self.t_min, self.t_max, self.n_t)

    @property
    def size(self) -> int:
        return self.n_t * self.n_levels


@dataclass
class StructuredFeatureVector:
    values: np.ndarray
    attribution: np.ndarray
    sources: tuple

    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)

    def flat_attribution(self) -> np.ndarray:
        return self.attribution.reshape(-1)

    def component(self, i: int) -> np.ndarray:
        """The part of the feature owned by sequence position ``i``."""
        return np.where(self.attribution == i, self.values, 0.0)

    def __len__(self):
        return self.values.size


def order_diagram(diagram: AnnotatedDiagram, degree: int) -> list:
    """Finite points of one degree, by persistence descending; ties go to the
    smaller death-simplex index."""
    pts = [(i, diagram.points[i]) for i in diagram.indices(degree, finite=True)]
    pts.sort(key=lambda ip: (-(ip[1].death - ip[1].birth), ip[1].death_simplex))
    return [OrderedPoint(p.birth, p.death, i) for i, p in pts]


def lifetime_map(od) -> tuple:
    return tuple(p.death - p.birth for p in od)


def tents(od, ts) -> np.ndarray:
    """Tent value of every ordered point at every t, shape (n_points, n_t)."""
    ts = np.asarray(ts, dtype=np.float64)
    out = np.zeros((len(od), len(ts)))
    for i, p in enumerate(od):
        b, d = p.birth, p.death
        m = 0.5 * (b + d)
        rise = (ts > b) & (ts <= m)
        fall = (ts > m) & (ts < d)
        out[i, rise] = ts[rise] - b
        out[i, fall] = d - ts[fall]
    return out


def landscape(od, grid: LandscapeGrid) -> StructuredFeatureVector:
    """Persistence landscape on ``grid`` with per-cell feature attribution.

    At each t the k-th level is the k-th element under (value desc, position
    asc); a zero value carries no attribution.
    """
    n = len(od)
    values = np.zeros((grid.n_levels, grid.n_t))
    attribution = np.full((grid.n_levels, grid.n_t), -1, dtype=np.int64)
    sources = tuple(p.source for p in od)
    if n == 0:
        return StructuredFeatureVector(values, attribution, sources)
    T = tents(od, grid.ts).T  # (n_t, n)
    pos = np.broadcast_to(np.arange(n), T.shape)
    rank = np.lexsort((pos, -T), axis=-1)[:, : grid.n_levels]
    top = np.take_along_axis(T, rank, axis=1)
    levels = top.shape[1]
    values[:levels] = top.T
    attribution[:levels] = np.where(top.T > 0, rank.T, -1)
    return StructuredFeatureVector(values, attribution, sources)


def death_vector(diagram: AnnotatedDiagram, L: int) -> StructuredFeatureVector:
    """Degree-0 deaths sorted descending, zero padded or truncated to ``L``.

    The essential class counts with death equal to the largest filtration
    weight.
    """
    items = []
    for i, p in enumerate(diagram.points):
        if p.degree != 0:
            continue
        d = diagram.max_weight if p.essential else p.death
        tie = -1 if p.essential else p.death_simplex
        items.append((d, tie, i))
    items.sort(key=lambda t: (-t[0], t[1]))
    items = items[:L]
    values = np.zeros(L)
    attribution = np.full(L, -1, dtype=np.int64)
    for pos, (d, _, _) in enumerate(items):
        values[pos] = d
        attribution[pos] = pos if d > 0 else -1
    return StructuredFeatureVector(values, attribution, tuple(i for _, _, i in items))


@dataclass(frozen=True)
class LandscapeFeaturizer:
    degree: int
    grid: LandscapeGrid

    kind = "landscape"

    def __call__(self, diagram: AnnotatedDiagram) -> StructuredFeatureVector:
        return landscape(order_diagram(diagram, self.degree), self.grid)

    def to_dict(self) -> dict:
        g = self.grid
        return {
            "kind": self.kind,
            "degree": self.degree,
            "t_min": g.t_min,
            "t_max": g.t_max,
            "n_t": g.n_t,
            "n_levels": g.n_levels,
        }


@dataclass(frozen=True)
class DeathVectorFeaturizer:
    length: int

    kind = "death-vector"

    def __call__(self, diagram: AnnotatedDiagram) -> StructuredFeatureVector:
        return death_vector(diagram, self.length)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "length": self.length}


def featurizer_from_dict(d: dict):
    if d["kind"] == "landscape":
        grid = LandscapeGrid(float(d["t_min"]), float(d["t_max"]), int(d["n_t"]), int(d["n_levels"]))
        return LandscapeFeaturizer(int(d["degree"]), grid)
    if d["kind"] == "death-vector":
        return DeathVectorFeaturizer(int(d["length"]))
    raise ValueError(f"unknown feature kind {d['kind']!r}")


def default_grid(diagrams, degree: int, n_t: int = 100, n_levels: int = 10,
                 t_max: Optional[float] = None) -> LandscapeGrid:
    """[0, largest finite death among points with positive persistence]
    unless ``t_max`` is given (zero-persistence points have flat tents)."""
    if t_max is None:
        deaths = [
            p.death
            for dg in diagrams
            for p in dg.points
            if p.degree == degree and not p.essential and p.death > p.birth
        ]
        t_max = max(deaths) if deaths and max(deaths) > 0 else 1.0
    return LandscapeGrid(0.0, float(t_max), n_t, n_levels)
