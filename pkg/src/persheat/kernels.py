"""Smoothing kernels, Monte-Carlo expected heatmaps and Lipschitz probes.

Sample ``j`` of an estimate with seed ``s`` always draws from
``default_rng(SeedSequence([s, j]))``, so an estimate does not depend on how
samples are spread over worker processes.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .complex import SimplicialComplex, filtration_order, monotone_repair, monotone_repair_batch
from .heatmap import ChainSelector, ConstantF, WeightFunction, heatmap
from .persistence import persistence_diagram

FAMILIES = ("triangular", "epanechnikov", "gaussian")


@dataclass(frozen=True)
class KernelSpec:
    family: str
    alpha: float
    dim: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.dim < 1:
            raise ValueError("dim must be at least 1")

    @property
    def compact(self) -> bool:
        return self.family != "gaussian"

    @property
    def support(self) -> float:
        """Radius outside of which the density is zero (or, for the Gaussian,
        carries under 1e-5 of the mass)."""
        return self.alpha if self.compact else 5.0 * self.alpha

    def to_dict(self) -> dict:
        return {"family": self.family, "alpha": self.alpha, "dim": self.dim}


def unit_ball_volume(k: int) -> float:
    return math.pi ** (k / 2) / math.gamma(k / 2 + 1)


def _profile(spec: KernelSpec, r):
    """Density as a function of the radius ``r = |x|``."""
    r = np.asarray(r, dtype=np.float64)
    a, k = spec.alpha, spec.dim
    if spec.family == "triangular":
        c = (k + 1) / (a**k * unit_ball_volume(k))
        return np.where(r < a, c * (1.0 - r / a), 0.0)
    if spec.family == "epanechnikov":
        c = (k + 2) / (2 * a**k * unit_ball_volume(k))
        return np.where(r < a, c * (1.0 - (r / a) ** 2), 0.0)
    c = 1.0 / (a**k * (2 * math.pi) ** (k / 2))
    return c * np.exp(-(r**2) / (2 * a * a))


def kernel_density(spec: KernelSpec, x) -> np.ndarray | float:
    """Density at ``x``; the last axis holds coordinates, so batches work."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != spec.dim:
        raise ValueError(f"expected {spec.dim} coordinates, got {x.shape[-1]}")
    out = _profile(spec, np.sqrt(np.sum(x * x, axis=-1)))
    return float(out) if out.ndim == 0 else out


def radial_density(spec: KernelSpec, r) -> np.ndarray:
    """Density of ``|eps|`` (surface measure times the profile)."""
    r = np.asarray(r, dtype=np.float64)
    k = spec.dim
    return k * unit_ball_volume(k) * r ** (k - 1) * _profile(spec, r)


def sample_perturbation(spec: KernelSpec, rng: np.random.Generator, size: Optional[int] = None) -> np.ndarray:
    """Draw eps with the kernel density; shape ``(dim,)`` or ``(size, dim)``.

    Compact families pick a uniform direction and a radius whose scaled form
    is Beta distributed: ``r/alpha ~ Beta(k, 2)`` for the triangular radial
    law ``r^(k-1)(1-r/alpha)`` and ``(r/alpha)^2 ~ Beta(k/2, 2)`` for the
    Epanechnikov law ``r^(k-1)(1-r^2/alpha^2)``.
    """
    n = 1 if size is None else size
    k, a = spec.dim, spec.alpha
    if spec.family == "gaussian":
        eps = a * rng.standard_normal((n, k))
    else:
        u = rng.standard_normal((n, k))
        norms = np.sqrt(np.sum(u * u, axis=1))
        while np.any(norms == 0.0):  # measure zero, but keep the division safe
            bad = norms == 0.0
            u[bad] = rng.standard_normal((int(bad.sum()), k))
            norms = np.sqrt(np.sum(u * u, axis=1))
        if spec.family == "triangular":
            r = a * rng.beta(k, 2.0, n)
        else:
            r = a * np.sqrt(rng.beta(k / 2.0, 2.0, n))
        eps = u / norms[:, None] * r[:, None]
    return eps[0] if size is None else eps


def substream(seed: int, j: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(j)]))


def component_lipschitz(spec: KernelSpec) -> float:
    """Lipschitz constant of the density itself."""
    a, k = spec.alpha, spec.dim
    if spec.family == "triangular":
        return (k + 1) / (a ** (k + 1) * unit_ball_volume(k))
    if spec.family == "epanechnikov":
        return (k + 2) / (a ** (k + 1) * unit_ball_volume(k))
    return math.exp(-0.5) / (a ** (k + 1) * (2 * math.pi) ** (k / 2))


def theoretical_bound(spec: KernelSpec, M: float) -> float:
    """Lipschitz bound of eta * K on B_alpha(x) for |eta| <= M componentwise."""
    a, k = spec.alpha, spec.dim
    if spec.family == "triangular":
        return 2 * M * (k + 1) * math.sqrt(k) / a
    if spec.family == "epanechnikov":
        return 2 * M * (k + 2) * math.sqrt(k) / a
    return 2 * M * math.sqrt(k) / (a * math.sqrt(2 * math.pi))


@dataclass
class ExpectedHeatmap:
    mean: np.ndarray
    stderr: np.ndarray
    n_samples: int
    seed: int
    kernel: Optional[KernelSpec] = None
    meta: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "mean": [float(v) for v in self.mean],
            "stderr": [float(v) for v in self.stderr],
            "n_samples": self.n_samples,
            "seed": self.seed,
            "kernel": None if self.kernel is None else self.kernel.to_dict(),
        }
        payload.update(self.meta)
        return json.dumps(payload, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "ExpectedHeatmap":
        d = json.loads(text)
        kern = d.pop("kernel", None)
        return cls(
            np.array(d.pop("mean"), dtype=np.float64),
            np.array(d.pop("stderr"), dtype=np.float64),
            int(d.pop("n_samples")),
            int(d.pop("seed")),
            None if kern is None else KernelSpec(kern["family"], float(kern["alpha"]), int(kern["dim"])),
            d,
        )


def summarize(samples) -> tuple:
    """Exactly rounded per-coordinate mean (independent of summation order)
    and standard error; stderr is 0 for a single sample."""
    S = np.asarray(samples, dtype=np.float64)
    n = S.shape[0]
    mean = np.array([math.fsum(col) for col in S.T]) / n
    if n < 2:
        return mean, np.zeros_like(mean)
    dev = S - mean
    var = np.array([math.fsum(col) for col in (dev * dev).T]) / (n - 1)
    return mean, np.sqrt(var) / math.sqrt(n)


def map_ordered(func, items, workers: int = 1) -> list:
    """``list(map(func, items))``, optionally across processes; order is kept."""
    items = list(items)
    if workers <= 1 or len(items) < 2:
        return [func(it) for it in items]
    chunk = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(func, items, chunksize=chunk))


@dataclass
class HeatmapMap:
    """eta: weights in R^k -> heatmap in R^k (after monotone repair).

    With a constant F the heatmap only depends on the filtration order, so
    results are memoised on it.
    """

    complex: SimplicialComplex
    F: WeightFunction
    sel: ChainSelector
    degree: Optional[int] = None
    include_essential: bool = False

    def __post_init__(self):
        self.sel = ChainSelector(self.sel)
        self._cache = {} if isinstance(self.F, ConstantF) else None

    def __call__(self, z) -> np.ndarray:
        w = monotone_repair(self.complex, z)
        if self._cache is not None:
            key = filtration_order(self.complex, w, check=False).tobytes()
            hit = self._cache.get(key)
            if hit is not None:
                return hit.copy()
        dg = persistence_diagram(self.complex, w)
        out = heatmap(dg, self.degree, self.F, self.sel, self.complex.k, self.include_essential).w
        if self._cache is not None:
            self._cache[key] = out.copy()
        return out

    def batch(self, Z) -> np.ndarray:
        """Evaluate every row of ``Z``; constant-F heatmaps are computed once
        per distinct filtration order."""
        W = monotone_repair_batch(self.complex, Z)
        if self._cache is None:
            return np.array([self(w) for w in W])
        orders = np.argsort(W, axis=1, kind="stable")
        _, first, inv = np.unique(orders, axis=0, return_index=True, return_inverse=True)
        vals = np.array([self(W[i]) for i in first])
        return vals[inv.reshape(-1)]

    def __getstate__(self):
        state = dict(self.__dict__)
        if state.get("_cache") is not None:
            state["_cache"] = {}
        return state


@dataclass
class SlicedMap:
    """Restriction of a heatmap map to a few free coordinates around a base
    point, reporting only the ``outputs`` components."""

    eta: HeatmapMap
    base: np.ndarray
    free: tuple
    outputs: tuple

    def _embed(self, Z):
        Z = np.array(Z, dtype=np.float64, ndmin=2)
        X = np.repeat(np.asarray(self.base, dtype=np.float64)[None, :], len(Z), axis=0)
        X[:, list(self.free)] = Z
        return X

    def __call__(self, z) -> np.ndarray:
        return self.eta(self._embed(z)[0])[list(self.outputs)]

    def batch(self, Z) -> np.ndarray:
        return self.eta.batch(self._embed(Z))[:, list(self.outputs)]


def evaluate_many(func: Callable, Z) -> np.ndarray:
    if hasattr(func, "batch"):
        return np.asarray(func.batch(Z), dtype=np.float64)
    return np.array([func(z) for z in Z], dtype=np.float64)


@dataclass
class _Shifted:
    func: Callable
    x: np.ndarray
    spec: KernelSpec
    seed: int

    def __call__(self, j):
        eps = sample_perturbation(self.spec, substream(self.seed, j))
        return self.func(self.x - eps)


def monte_carlo(func: Callable, x, spec: KernelSpec, n: int = 100, seed: int = 0,
                workers: int = 1) -> ExpectedHeatmap:
    """Estimate ``(func * K)(x)`` from ``n`` seeded kernel samples."""
    x = np.asarray(x, dtype=np.float64)
    if len(x) != spec.dim:
        raise ValueError(f"kernel dim {spec.dim} does not match input length {len(x)}")
    if n < 1:
        raise ValueError("n must be at least 1")
    samples = map_ordered(_Shifted(func, x, spec, seed), range(n), workers)
    mean, se = summarize(samples)
    return ExpectedHeatmap(mean, se, n, seed, spec)


def expected_heatmap(x, complex: SimplicialComplex, F: WeightFunction, sel, spec: KernelSpec,
                     n: int = 100, seed: int = 0, degree: Optional[int] = None, workers: int = 1,
                     include_essential: bool = False) -> ExpectedHeatmap:
    """Monte-Carlo mean of the heatmap at ``repair(x - eps_j)``."""
    eta = HeatmapMap(complex, F, sel, degree, include_essential)
    out = monte_carlo(eta, x, spec, n, seed, workers)
    out.meta = {"selector": ChainSelector(sel).value, "degree": degree}
    return out


@dataclass
class ThetaMap:
    """(weights, positions) stacked into one vector -> raster."""

    eta: HeatmapMap
    vertices: tuple
    grid: object

    def __call__(self, z) -> np.ndarray:
        from .geometry import GeometricRealization
        from .raster import rasterize

        k = self.eta.complex.k
        w = self.eta(z[:k])
        realization = GeometricRealization(self.vertices, np.asarray(z[k:]).reshape(len(self.vertices), -1))
        return rasterize(w, self.eta.complex, realization, self.grid)


def expected_theta(x, realization, complex: SimplicialComplex, F: WeightFunction, sel, grid,
                   spec: KernelSpec, n: int = 100, seed: int = 0, degree: Optional[int] = None,
                   workers: int = 1) -> ExpectedHeatmap:
    """Perturb weights and vertex positions jointly; average the rasters."""
    x = np.asarray(x, dtype=np.float64)
    z = np.concatenate([x, realization.as_vector()])
    theta = ThetaMap(HeatmapMap(complex, F, sel, degree), tuple(realization.vertices), grid)
    out = monte_carlo(theta, z, spec, n, seed, workers)
    out.meta = {"selector": ChainSelector(sel).value, "degree": degree, "grid": [grid.lo, grid.hi, grid.g]}
    return out


def quadrature_nodes(spec: KernelSpec, n_nodes: int = 61) -> tuple:
    """Midpoint tensor grid over the kernel support and normalised weights."""
    if spec.dim > 3:
        raise ValueError("quadrature is limited to dim <= 3")
    R = spec.support
    h = 2 * R / n_nodes
    axis = -R + h * (np.arange(n_nodes) + 0.5)
    mesh = np.stack(np.meshgrid(*([axis] * spec.dim), indexing="ij"), axis=-1).reshape(-1, spec.dim)
    wts = kernel_density(spec, mesh) * h**spec.dim
    keep = wts > 0
    mesh, wts = mesh[keep], wts[keep]
    return mesh, wts / math.fsum(wts)


def convolve_quadrature(func: Callable, x, nodes) -> np.ndarray:
    mesh, wts = nodes
    x = np.asarray(x, dtype=np.float64)
    return wts @ evaluate_many(func, x - mesh)


class LatticeConvolution:
    """``(func * K)(u)`` for any ``u`` in a box, from ``func`` sampled once on a
    fixed lattice covering the box widened by the kernel support.

    ``E(u) = sum_i func(y_i) K(u - y_i) / sum_i K(u - y_i)``. Because the
    lattice does not move with ``u``, ``E`` is continuous even when ``func``
    jumps, and a constant ``func`` gives a constant ``E``. The lattice
    spacing is ``2 * support / n_nodes``.
    """

    def __init__(self, func: Callable, spec: KernelSpec, lo, hi, n_nodes: int = 61):
        if spec.dim > 3:
            raise ValueError("quadrature is limited to dim <= 3")
        self.spec = spec
        R = spec.support
        h = 2 * R / n_nodes
        lo = np.asarray(lo, dtype=np.float64) - R
        hi = np.asarray(hi, dtype=np.float64) + R
        axes = [np.arange(math.floor(a / h), math.ceil(b / h) + 1) * h for a, b in zip(lo, hi)]
        self.nodes = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, spec.dim)
        self.values = evaluate_many(func, self.nodes)
        self.M = float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def __call__(self, u) -> np.ndarray:
        wts = kernel_density(self.spec, np.asarray(u, dtype=np.float64) - self.nodes)
        keep = wts > 0
        wts = wts[keep]
        return (wts @ self.values[keep]) / math.fsum(wts)


@dataclass
class ProbeResult:
    max_ratio: float
    bound: float
    M: float
    n_pairs: int
    mode: str

    @property
    def ok(self) -> bool:
        return self.max_ratio <= self.bound

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def probe_pairs(x, spec: KernelSpec, n_pairs: int, seed: int = 0) -> list:
    """Random pairs drawn uniformly from the ball B_alpha(x)."""
    x = np.asarray(x, dtype=np.float64)
    rng = np.random.default_rng(seed)
    k = len(x)

    def ball(m):
        u = rng.standard_normal((m, k))
        u /= np.linalg.norm(u, axis=1)[:, None]
        return x + spec.alpha * u * (rng.random(m) ** (1.0 / k))[:, None]

    return list(zip(ball(n_pairs), ball(n_pairs)))


def lipschitz_probe(func: Callable, spec: KernelSpec, pairs, mode: str = "quadrature",
                    n_nodes: int = 61, n: int = 100, seed: int = 0) -> ProbeResult:
    """Largest ``|E(u) - E(v)| / |u - v|`` over ``pairs`` with ``E = func * K``.

    ``M`` is the largest absolute component of ``func`` seen while
    evaluating, which covers the probed region widened by the kernel support.
    Quadrature mode uses :class:`LatticeConvolution`; Monte-Carlo mode uses
    common random numbers for ``u`` and ``v``.
    """
    pairs = [(np.asarray(u, dtype=np.float64), np.asarray(v, dtype=np.float64)) for u, v in pairs]
    if mode == "quadrature":
        pts = np.array([p for uv in pairs for p in uv])
        conv = LatticeConvolution(func, spec, pts.min(axis=0), pts.max(axis=0), n_nodes)
        E, M = conv, conv.M
    elif mode == "monte_carlo":
        seen = [0.0]

        def tracked(z):
            v = np.asarray(func(z), dtype=np.float64)
            if v.size:
                seen[0] = max(seen[0], float(np.max(np.abs(v))))
            return v

        def E(z):
            return monte_carlo(tracked, z, spec, n, seed).mean
    else:
        raise ValueError(f"unknown mode {mode!r}")
    best = 0.0
    for u, v in pairs:
        u = np.asarray(u, dtype=np.float64)
        v = np.asarray(v, dtype=np.float64)
        d = float(np.linalg.norm(u - v))
        if d == 0.0:
            continue
        best = max(best, float(np.linalg.norm(E(u) - E(v))) / d)
    if mode == "monte_carlo":
        M = seen[0]
    return ProbeResult(best, theoretical_bound(spec, M), M, len(pairs), mode)
