"""Finite totally ordered simplicial complexes and monotone weight functions.

A complex keeps its simplices in a caller-defined total order; ``order_index``
is the position of a simplex in that order. Weight vectors are plain float64
arrays indexed by ``order_index``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Iterable, Sequence

import numpy as np


class ComplexError(ValueError):
    pass


class MissingFace(ComplexError):
    pass


class DuplicateSimplex(ComplexError):
    pass


class LengthMismatch(ComplexError):
    pass


class NotMonotone(ComplexError):
    pass


@dataclass(frozen=True)
class Simplex:
    vertices: tuple
    order_index: int

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    def __len__(self):
        return len(self.vertices)


class SimplicialComplex:
    """Simplices in total order together with their codimension-1 face table.

    ``faces[i]`` holds the order indices of the faces of simplex ``i``
    (empty for vertices).
    """

    def __init__(self, simplices: Sequence[Simplex], faces: Sequence[tuple]):
        self.simplices = tuple(simplices)
        self.faces = tuple(tuple(f) for f in faces)
        self._index = {s.vertices: s.order_index for s in self.simplices}
        self.dims = np.array([s.dim for s in self.simplices], dtype=np.int64)
        self._by_dim = {}
        for d in range(int(self.dims.max()) + 1 if len(self.dims) else 0):
            idx = np.flatnonzero(self.dims == d)
            face_arr = (
                np.array([self.faces[i] for i in idx], dtype=np.int64).reshape(len(idx), d + 1)
                if d > 0
                else np.empty((len(idx), 0), dtype=np.int64)
            )
            self._by_dim[d] = (idx, face_arr)

    @property
    def k(self) -> int:
        return len(self.simplices)

    def __len__(self):
        return len(self.simplices)

    def __iter__(self):
        return iter(self.simplices)

    def __getitem__(self, i) -> Simplex:
        return self.simplices[i]

    @property
    def max_dim(self) -> int:
        return int(self.dims.max()) if len(self.dims) else -1

    def index_of(self, vertices: Iterable[Hashable]) -> int:
        return self._index[tuple(sorted(vertices))]

    def __contains__(self, vertices) -> bool:
        return tuple(sorted(vertices)) in self._index

    @property
    def vertex_ids(self) -> list:
        return [s.vertices[0] for s in self.simplices if s.dim == 0]

    def dimension_blocks(self):
        """Yield ``(dim, simplex_indices, face_index_array)`` in increasing dimension."""
        for d in sorted(self._by_dim):
            idx, faces = self._by_dim[d]
            yield d, idx, faces

    def __repr__(self):
        counts = np.bincount(self.dims) if len(self.dims) else []
        return f"SimplicialComplex(k={self.k}, counts={list(counts)})"


def build_complex(simplex_list: Iterable[Iterable[Hashable]]) -> SimplicialComplex:
    """Build a complex whose total order is the order of ``simplex_list``."""
    keys = [tuple(sorted(s)) for s in simplex_list]
    index = {}
    for i, key in enumerate(keys):
        if not key:
            raise ComplexError("empty simplex")
        if len(set(key)) != len(key):
            raise ComplexError(f"repeated vertex in simplex {key}")
        if key in index:
            raise DuplicateSimplex(f"simplex {key} listed twice")
        index[key] = i
    faces = []
    for key in keys:
        if len(key) == 1:
            faces.append(())
            continue
        row = []
        for face in combinations(key, len(key) - 1):
            j = index.get(face)
            if j is None:
                raise MissingFace(f"face {face} of {key} is absent")
            row.append(j)
        faces.append(tuple(row))
    simplices = [Simplex(key, i) for i, key in enumerate(keys)]
    return SimplicialComplex(simplices, faces)


def _check_length(complex: SimplicialComplex, w) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (complex.k,):
        raise LengthMismatch(f"expected {complex.k} weights, got shape {w.shape}")
    return w


def validate_monotone(complex: SimplicialComplex, w) -> bool:
    w = _check_length(complex, w)
    for d, idx, faces in complex.dimension_blocks():
        if d == 0 or len(idx) == 0:
            continue
        if np.any(w[faces].max(axis=1) > w[idx]):
            return False
    return True


def monotone_repair(complex: SimplicialComplex, x) -> np.ndarray:
    """Least monotone majorant of ``x``: each simplex takes the max of its own
    value and its (already repaired) faces, processed in increasing dimension."""
    w = _check_length(complex, x).copy()
    for d, idx, faces in complex.dimension_blocks():
        if d == 0 or len(idx) == 0:
            continue
        w[idx] = np.maximum(w[idx], w[faces].max(axis=1))
    return w


def monotone_repair_batch(complex: SimplicialComplex, X) -> np.ndarray:
    """Row-wise :func:`monotone_repair` of an ``(n, k)`` array."""
    W = np.array(X, dtype=np.float64, ndmin=2)
    if W.shape[1] != complex.k:
        raise LengthMismatch(f"expected {complex.k} columns, got shape {W.shape}")
    for d, idx, faces in complex.dimension_blocks():
        if d == 0 or len(idx) == 0:
            continue
        W[:, idx] = np.maximum(W[:, idx], W[:, faces].max(axis=2))
    return W


def filtration_order(complex: SimplicialComplex, w, check: bool = True) -> np.ndarray:
    """Permutation of order indices sorted by (weight, order_index)."""
    w = _check_length(complex, w)
    if check and not validate_monotone(complex, w):
        raise NotMonotone("weights are not monotone on the complex")
    return np.lexsort((np.arange(complex.k), w))


def read_filtration(path) -> tuple[SimplicialComplex, np.ndarray]:
    """Parse ``v1 v2 ... ; weight`` lines (``#`` starts a comment)."""
    simplices, weights = [], []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if ";" not in line:
                raise ValueError(f"{path}:{lineno}: missing ';' separator")
            verts, weight = line.split(";", 1)
            simplices.append([_vertex_token(v) for v in verts.split()])
            weights.append(float(weight))
    return build_complex(simplices), np.array(weights, dtype=np.float64)


def write_filtration(path, complex: SimplicialComplex, w) -> None:
    w = _check_length(complex, w)
    with open(path, "w") as fh:
        for s, wi in zip(complex.simplices, w):
            fh.write(" ".join(str(v) for v in s.vertices) + " ; " + repr(float(wi)) + "\n")


def _vertex_token(tok: str):
    try:
        return int(tok)
    except ValueError:
        return tok
