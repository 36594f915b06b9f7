"""Synthetic point clouds and point-cloud CSV files."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

KINDS = ("annulus", "double_annulus", "uniform_disc", "linked_twist")

# (cx, cy, r_in, r_out) for the three annulus classes
CLASS_A = ((0.0, 0.0, 0.8, 1.0),)
CLASS_B = ((0.0, 0.0, 0.8, 1.0), (1.7, 0.0, 0.5, 0.7))
CLASS_C = ((0.0, 0.0, 1.6, 2.0),)
ANNULUS_CLASSES = {"A": CLASS_A, "B": CLASS_B, "C": CLASS_C}


@dataclass(frozen=True)
class GeneratorSpec:
    """What to sample. ``params`` depends on ``kind``:

    * annulus / double_annulus: ``annuli`` = tuple of (cx, cy, r_in, r_out)
    * uniform_disc: ``radius`` (default 1)
    * linked_twist: ``r`` and optional ``x0`` = (x, y); a missing ``x0`` is
      drawn uniformly from the unit square
    """

    kind: str
    n: int = 200
    noise: float = 0.0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.noise < 0:
            raise ValueError("noise must be non-negative")
        if self.kind in ("annulus", "double_annulus"):
            for cx, cy, r_in, r_out in self.params["annuli"]:
                if not 0 <= r_in < r_out:
                    raise ValueError("need 0 <= r_in < r_out")
        if self.kind == "linked_twist" and not self.params.get("r", 0) > 0:
            raise ValueError("linked twist needs r > 0")

    def to_dict(self) -> dict:
        params = {k: (list(map(list, v)) if k == "annuli" else v) for k, v in self.params.items()}
        return {"kind": self.kind, "n": self.n, "noise": self.noise, "params": params}

    def __hash__(self):
        return hash((self.kind, self.n, self.noise, repr(sorted(self.params.items()))))


def annulus_spec(cls: str = "A", n: int = 200, noise: float = 0.1) -> GeneratorSpec:
    annuli = ANNULUS_CLASSES[cls]
    kind = "double_annulus" if len(annuli) > 1 else "annulus"
    return GeneratorSpec(kind, n, noise, {"annuli": annuli})


def rejection_sample(inside, box, n: int, rng: np.random.Generator, batch: int = 256) -> tuple:
    """Uniform points of ``box = (x0, x1, y0, y1)`` kept while ``inside`` holds.

    Returns the first ``n`` accepted points and how many candidates it took.
    """
    x0, x1, y0, y1 = box
    kept = []
    have = 0
    tried = 0
    while have < n:
        cand = np.column_stack([rng.uniform(x0, x1, batch), rng.uniform(y0, y1, batch)])
        ok = np.flatnonzero(inside(cand))
        need = n - have
        if len(ok) >= need:
            tried += int(ok[need - 1]) + 1
            kept.append(cand[ok[:need]])
            have = n
        else:
            tried += batch
            kept.append(cand[ok])
            have += len(ok)
    return np.concatenate(kept), tried


def in_annuli(pts, annuli) -> np.ndarray:
    ok = np.zeros(len(pts), dtype=bool)
    for cx, cy, r_in, r_out in annuli:
        d = np.hypot(pts[:, 0] - cx, pts[:, 1] - cy)
        ok |= (d >= r_in) & (d <= r_out)
    return ok


def annuli_box(annuli) -> tuple:
    return (
        min(cx - r for cx, _, _, r in annuli),
        max(cx + r for cx, _, _, r in annuli),
        min(cy - r for _, cy, _, r in annuli),
        max(cy + r for _, cy, _, r in annuli),
    )


def gen_annulus(n, rng, annuli=CLASS_A, noise: float = 0.0) -> np.ndarray:
    pts, _ = rejection_sample(lambda p: in_annuli(p, annuli), annuli_box(annuli), n, rng)
    if noise > 0:
        pts = pts + rng.normal(0.0, noise, pts.shape)
    return pts


def gen_double_annulus(n, rng, annuli=CLASS_B, noise: float = 0.0) -> np.ndarray:
    if len(annuli) != 2:
        raise ValueError("a double annulus needs two annuli")
    return gen_annulus(n, rng, annuli, noise)


def gen_uniform_disc(n, rng, radius: float = 1.0, noise: float = 0.0) -> np.ndarray:
    box = (-radius, radius, -radius, radius)
    pts, _ = rejection_sample(lambda p: np.hypot(p[:, 0], p[:, 1]) <= radius, box, n, rng)
    if noise > 0:
        pts = pts + rng.normal(0.0, noise, pts.shape)
    return pts


def linked_twist_step(x: float, y: float, r: float) -> tuple:
    x = (x + r * y * (1.0 - y)) % 1.0
    y = (y + r * x * (1.0 - x)) % 1.0
    return x, y


def gen_linked_twist(n, r: float, rng=None, x0=None) -> np.ndarray:
    """Orbit of length ``n`` starting at (and including) ``x0``."""
    if x0 is None:
        if rng is None:
            raise ValueError("need an initial point or a generator")
        x0 = tuple(rng.random(2))
    x, y = float(x0[0]), float(x0[1])
    out = np.empty((n, 2))
    for i in range(n):
        out[i] = x, y
        x, y = linked_twist_step(x, y, r)
    return out


def generate(spec: GeneratorSpec, rng: np.random.Generator) -> np.ndarray:
    p = spec.params
    if spec.kind == "annulus":
        pts = gen_annulus(spec.n, rng, p.get("annuli", CLASS_A), spec.noise)
    elif spec.kind == "double_annulus":
        pts = gen_double_annulus(spec.n, rng, p.get("annuli", CLASS_B), spec.noise)
    elif spec.kind == "uniform_disc":
        pts = gen_uniform_disc(spec.n, rng, p.get("radius", 1.0), spec.noise)
    else:
        pts = gen_linked_twist(spec.n, p["r"], rng, p.get("x0"))
        if spec.noise > 0:
            pts = pts + rng.normal(0.0, spec.noise, pts.shape)
    return pts


def write_points(path, pts) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["x", "y"])
        for x, y in np.asarray(pts, dtype=np.float64):
            out.writerow([repr(float(x)), repr(float(y))])


def read_points(path, shuffle: bool = False, seed: int = 0) -> np.ndarray:
    """Read an ``x,y`` CSV (a header row is optional). ``shuffle`` permutes
    the rows with ``seed``, e.g. to break up conjugate eigenvalue pairs."""
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec or rec[0].startswith("#"):
                continue
            try:
                rows.append((float(rec[0]), float(rec[1])))
            except ValueError:
                if rows:
                    raise
    pts = np.array(rows, dtype=np.float64).reshape(-1, 2)
    if shuffle:
        pts = pts[np.random.default_rng(seed).permutation(len(pts))]
    return pts
