"""Persistence heatmaps: per-simplex weights sum_i F(b_i, d_i) * alpha_i."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .persistence import AnnotatedDiagram, AnnotatedPoint


class EmptyChain(ValueError):
    pass


class ChainSelector(str, enum.Enum):
    BIRTH_SIMPLEX = "birth_simplex"
    DEATH_SIMPLEX = "death_simplex"
    REP_CYCLE = "rep_cycle"
    BOUNDING_CHAIN = "bounding_chain"

    @property
    def needs_death(self) -> bool:
        return self in (ChainSelector.DEATH_SIMPLEX, ChainSelector.BOUNDING_CHAIN)

    def chain(self, p: AnnotatedPoint) -> tuple:
        if self is ChainSelector.BIRTH_SIMPLEX:
            return (p.birth_simplex,)
        if self is ChainSelector.DEATH_SIMPLEX:
            return () if p.death_simplex is None else (p.death_simplex,)
        if self is ChainSelector.REP_CYCLE:
            return p.rep_cycle.simplices
        return () if p.bounding_chain is None else p.bounding_chain.simplices


class WeightFunction:
    """Base for F. ``point_weights`` returns F for the requested point indices."""

    def point_weights(self, diagram: AnnotatedDiagram, indices) -> np.ndarray:
        raise NotImplementedError

    def __add__(self, other: "WeightFunction") -> "WeightFunction":
        return SumF((self, other))


@dataclass(frozen=True)
class ConstantF(WeightFunction):
    c: float = 1.0

    def point_weights(self, diagram, indices):
        return np.full(len(indices), float(self.c))


@dataclass(frozen=True)
class PersistenceF(WeightFunction):
    def point_weights(self, diagram, indices):
        return np.array([diagram.points[i].death - diagram.points[i].birth for i in indices], dtype=np.float64)


@dataclass(frozen=True)
class SumF(WeightFunction):
    terms: tuple

    def point_weights(self, diagram, indices):
        out = np.zeros(len(indices))
        for t in self.terms:
            out = out + t.point_weights(diagram, indices)
        return out


@dataclass(frozen=True)
class LearnedF(WeightFunction):
    """Per-point weights fixed for one diagram, keyed by point index."""

    weights: dict = field(default_factory=dict)

    def point_weights(self, diagram, indices):
        return np.array([self.weights.get(i, 0.0) for i in indices], dtype=np.float64)


@dataclass
class HeatmapWeights:
    w: np.ndarray
    provenance: Optional[list] = None

    def __len__(self):
        return len(self.w)


def heatmap(
    diagram: AnnotatedDiagram,
    degree: Optional[int],
    F: WeightFunction,
    sel: ChainSelector | str,
    k: Optional[int] = None,
    include_essential: bool = False,
    provenance: bool = False,
) -> HeatmapWeights:
    """Spread F(point) equally over the selected chain of each included point.

    ``degree=None`` includes every degree. Essential points are skipped unless
    ``include_essential`` is set and the selector has no death side.
    """
    sel = ChainSelector(sel)
    idx = [
        i
        for i, p in enumerate(diagram.points)
        if (degree is None or p.degree == degree)
        and (not p.essential or (include_essential and not sel.needs_death))
    ]
    Fi = F.point_weights(diagram, idx)
    if k is None:
        k = diagram.n_simplices
    w = np.zeros(k)
    prov = [[] for _ in range(k)] if provenance else None
    for i, f in zip(idx, Fi):
        members = sel.chain(diagram.points[i])
        if not members:
            raise EmptyChain(f"point {i} has an empty {sel.value}")
        share = f / len(members)
        for s in members:
            w[s] += share
            if prov is not None:
                prov[s].append((i, share))
    return HeatmapWeights(w, prov)


def heatmap_as_point(hw: HeatmapWeights) -> np.ndarray:
    return hw.w
