"""Boundary matrices, the standard reduction, and annotated persistence diagrams."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _backend
from .complex import SimplicialComplex, filtration_order


class DimZero(ValueError):
    pass


@dataclass
class SparseZ2Matrix:
    """Square Z/2 matrix stored as sorted row-index lists, one per column."""

    columns: list
    n: int

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=np.uint8)
        for j, col in enumerate(self.columns):
            out[col, j] = 1
        return out

    def pivot(self, j: int) -> int:
        col = self.columns[j]
        return col[-1] if col else -1


@dataclass
class ReductionResult:
    R: SparseZ2Matrix
    V: SparseZ2Matrix
    pivots: dict  # pivot row -> column


@dataclass(frozen=True)
class Z2Chain:
    simplices: tuple
    dim: int

    @property
    def is_zero(self) -> bool:
        return not self.simplices

    def __add__(self, other: "Z2Chain") -> "Z2Chain":
        if self.simplices and other.simplices and self.dim != other.dim:
            raise ValueError("cannot add chains of different dimension")
        return Z2Chain(tuple(sorted(set(self.simplices) ^ set(other.simplices))), self.dim)

    def __len__(self):
        return len(self.simplices)

    def __iter__(self):
        return iter(self.simplices)


@dataclass(frozen=True)
class AnnotatedPoint:
    birth: float
    death: float
    degree: int
    birth_simplex: int
    death_simplex: Optional[int]
    rep_cycle: Z2Chain
    bounding_chain: Optional[Z2Chain]

    @property
    def essential(self) -> bool:
        return self.death_simplex is None

    @property
    def persistence(self) -> float:
        return self.death - self.birth

    def to_dict(self) -> dict:
        return {
            "birth": self.birth,
            "death": "inf" if math.isinf(self.death) else self.death,
            "degree": self.degree,
            "birth_simplex": self.birth_simplex,
            "death_simplex": self.death_simplex,
            "rep_cycle": list(self.rep_cycle.simplices),
            "bounding_chain": None if self.bounding_chain is None else list(self.bounding_chain.simplices),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnnotatedPoint":
        death = math.inf if d["death"] == "inf" else float(d["death"])
        deg = int(d["degree"])
        bc = d.get("bounding_chain")
        return cls(
            birth=float(d["birth"]),
            death=death,
            degree=deg,
            birth_simplex=int(d["birth_simplex"]),
            death_simplex=None if d.get("death_simplex") is None else int(d["death_simplex"]),
            rep_cycle=Z2Chain(tuple(d["rep_cycle"]), deg),
            bounding_chain=None if bc is None else Z2Chain(tuple(bc), deg + 1),
        )


@dataclass
class AnnotatedDiagram:
    points: list
    max_weight: float = 0.0
    n_simplices: int = 0
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def indices(self, degree: Optional[int] = None, finite: bool = True) -> list:
        return [
            i
            for i, p in enumerate(self.points)
            if (degree is None or p.degree == degree) and (not finite or not p.essential)
        ]

    def pairs(self, degree: Optional[int] = None, finite: bool = True) -> list:
        return [(self.points[i].birth, self.points[i].death) for i in self.indices(degree, finite)]

    def to_json(self) -> str:
        payload = {
            "max_weight": self.max_weight,
            "n_simplices": self.n_simplices,
            "points": [p.to_dict() for p in self.points],
        }
        return json.dumps(payload, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "AnnotatedDiagram":
        payload = json.loads(text)
        return cls(
            [AnnotatedPoint.from_dict(p) for p in payload["points"]],
            float(payload.get("max_weight", 0.0)),
            int(payload.get("n_simplices", 0)),
        )


def boundary_matrix(complex: SimplicialComplex, order) -> SparseZ2Matrix:
    order = np.asarray(order)
    position = np.empty(complex.k, dtype=np.int64)
    position[order] = np.arange(complex.k)
    faces = complex.faces
    columns = [sorted(int(position[f]) for f in faces[s]) for s in order]
    return SparseZ2Matrix(columns, complex.k)


def reduce(D: SparseZ2Matrix) -> ReductionResult:
    R, V, low = _backend.reduce_columns(D.columns)
    pivots = {p: j for j, p in enumerate(low) if p >= 0}
    return ReductionResult(SparseZ2Matrix(R, D.n), SparseZ2Matrix(V, D.n), pivots)


def annotate(result: ReductionResult, complex: SimplicialComplex, w, order) -> AnnotatedDiagram:
    """Read birth/death simplices and chains off a reduction.

    Chains are reported in complex order indices. A zero column that is never
    a pivot row becomes an essential point whose representative is the cycle
    ``V e_j``.
    """
    w = np.asarray(w, dtype=np.float64)
    order = np.asarray(order)
    dims = complex.dims

    def chain(positions, dim):
        return Z2Chain(tuple(sorted(int(order[p]) for p in positions)), dim)

    points = []
    R, V = result.R.columns, result.V.columns
    for j in range(result.R.n):
        col = R[j]
        if col:
            i = col[-1]
            b_s, d_s = int(order[i]), int(order[j])
            deg = int(dims[b_s])
            points.append(
                AnnotatedPoint(
                    birth=float(w[b_s]),
                    death=float(w[d_s]),
                    degree=deg,
                    birth_simplex=b_s,
                    death_simplex=d_s,
                    rep_cycle=chain(col, deg),
                    bounding_chain=chain(V[j], deg + 1),
                )
            )
        elif j not in result.pivots:
            b_s = int(order[j])
            deg = int(dims[b_s])
            points.append(
                AnnotatedPoint(
                    birth=float(w[b_s]),
                    death=math.inf,
                    degree=deg,
                    birth_simplex=b_s,
                    death_simplex=None,
                    rep_cycle=chain(V[j], deg),
                    bounding_chain=None,
                )
            )
    max_weight = float(w.max()) if len(w) else 0.0
    return AnnotatedDiagram(points, max_weight, complex.k)


def persistence_diagram(complex: SimplicialComplex, w) -> AnnotatedDiagram:
    """Filtration order, boundary matrix, reduction and annotation in one call."""
    order = filtration_order(complex, w)
    return annotate(reduce(boundary_matrix(complex, order)), complex, w, order)


def boundary_of(chain: Z2Chain, complex: SimplicialComplex) -> Z2Chain:
    if chain.dim < 1:
        raise DimZero("boundary of a 0-chain is not taken")
    acc = set()
    for s in chain.simplices:
        acc.symmetric_difference_update(complex.faces[s])
    return Z2Chain(tuple(sorted(acc)), chain.dim - 1)


def drop_zero_persistence(diagram: AnnotatedDiagram) -> AnnotatedDiagram:
    return AnnotatedDiagram(
        [p for p in diagram.points if p.essential or p.death > p.birth],
        diagram.max_weight,
        diagram.n_simplices,
        dict(diagram.meta),
    )
