"""Linear SVM / SVR by primal stochastic subgradient descent, and the learned F.

Samples are visited in a seeded shuffle each epoch with step
``eta0 / (1 + lambda * eta0 * t)``, where ``eta0`` is one over the largest
squared sample norm (bias input included); the bias is not regularised.
After each epoch the epoch-averaged iterate is scored on the full objective
and kept if it improves on the best so far, so the returned
``objective_history`` is non-increasing.

``lambda`` applies to the coefficients of the scaled features (see
``scaling``); regression targets are centred and divided by their largest
deviation with ``lambda`` and ``eps_tube`` adjusted so that this step does
not change the minimiser.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .heatmap import LearnedF, WeightFunction


class LearnError(ValueError):
    pass


class DegenerateLabels(LearnError):
    pass


class DimensionMismatch(LearnError):
    pass


@dataclass
class LinearModel:
    f: np.ndarray
    b: float
    meta: dict = field(default_factory=dict)

    def decision(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != len(self.f):
            raise DimensionMismatch(f"model has {len(self.f)} features, data has {X.shape[1]}")
        return X @ self.f + self.b

    def predict(self, X) -> np.ndarray:
        if self.meta.get("task") == "svr":
            return self.decision(X)
        return np.where(self.decision(X) >= 0, 1, -1)

    def to_json(self) -> str:
        payload = {
            "f": [float(v) for v in self.f],
            "b": float(self.b),
            "lambda": self.meta.get("lambda"),
            "epochs": self.meta.get("epochs"),
            "seed": self.meta.get("seed"),
        }
        payload.update({k: v for k, v in self.meta.items() if k not in payload})
        return json.dumps(payload, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "LinearModel":
        d = json.loads(text)
        f = np.array(d.pop("f"), dtype=np.float64)
        b = float(d.pop("b"))
        return cls(f, b, d)


def _prepare(X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch("X must be a 2-D array")
    if len(X) != len(y):
        raise DimensionMismatch(f"{len(X)} samples but {len(y)} targets")
    if len(X) < 2:
        raise LearnError("need at least two samples")
    return X, y


SCALINGS = ("none", "global", "zscore")


def _scale(X, scaling):
    """Rescale features for training; returns ``(Z, mu, scale, live)`` with
    ``Z = (X - mu) / scale`` on live columns."""
    p = X.shape[1]
    if scaling == "none":
        return X, np.zeros(p), np.ones(p), np.ones(p, dtype=bool)
    if scaling == "global":
        s = float(np.max(np.abs(X))) if X.size else 0.0
        s = s if s > 0 else 1.0
        return X / s, np.zeros(p), np.full(p, s), np.ones(p, dtype=bool)
    if scaling == "zscore":
        mu = X.mean(axis=0)
        sd = X.std(axis=0)
        live = sd > 0
        scale = np.where(live, sd, 1.0)
        return (X - mu) / scale * live, mu, scale, live
    raise ValueError(f"unknown scaling {scaling!r}")


def _sgd(X, y, lam, epochs, seed, dloss, objective):
    """Shared SGD loop. ``dloss(score, target)`` is a subgradient of the loss
    with respect to the score. Returns ``(f, b, objective_history)``."""
    n, p = X.shape
    rng = np.random.default_rng(seed)
    Xa = np.hstack([X, np.ones((n, 1))])
    eta0 = 1.0 / float(np.max(np.sum(Xa * Xa, axis=1)))
    wa = np.zeros(p + 1)
    best_w = wa.copy()
    best_obj = objective(best_w[:p], best_w[p])
    history = [best_obj]
    t = 0
    for _ in range(epochs):
        acc = np.zeros(p + 1)
        for i in rng.permutation(n):
            eta = eta0 / (1.0 + lam * eta0 * t)
            t += 1
            g = dloss(Xa[i] @ wa, y[i])
            wa[:p] *= 1.0 - eta * lam
            if g != 0.0:
                wa -= (eta * g) * Xa[i]
            acc += wa
        cand = acc / n
        obj = objective(cand[:p], cand[p])
        if obj <= best_obj:
            best_obj, best_w = obj, cand
        history.append(best_obj)
    return best_w[:p].copy(), float(best_w[p]), history


def _finish(f, b, mu, scale, live):
    f_raw = np.where(live, f / scale, 0.0)
    return f_raw, float(b - f_raw @ mu)


def hinge_objective(f, b, X, y, lam):
    margins = y * (X @ f + b)
    return 0.5 * lam * float(f @ f) + float(np.mean(np.maximum(0.0, 1.0 - margins)))


def tube_objective(f, b, X, y, lam, eps):
    r = np.abs(X @ f + b - y)
    return 0.5 * lam * float(f @ f) + float(np.mean(np.maximum(0.0, r - eps)))


def train_svm(X, y, lam: float = 1e-3, epochs: int = 200, seed: int = 0,
              scaling: str = "global") -> LinearModel:
    """Soft-margin linear SVM; labels must be -1/+1 and both present.

    ``scaling`` rescales the features for training: ``"global"`` divides
    everything by the largest magnitude, ``"zscore"`` standardises each
    column. Returned coefficients are always in raw feature units, so the
    decision value is ``f.v + b`` on unscaled features.
    """
    X, y = _prepare(X, y)
    if not set(np.unique(y)) <= {-1.0, 1.0}:
        raise LearnError("labels must be -1 or +1")
    if len(np.unique(y)) < 2:
        raise DegenerateLabels("both classes must be present")
    Z, mu, scale, live = _scale(X, scaling)

    def dloss(score, target):
        return -target if target * score < 1.0 else 0.0

    f, b, hist = _sgd(Z, y, lam, epochs, seed, dloss, lambda f, b: hinge_objective(f, b, Z, y, lam))
    f, b = _finish(f, b, mu, scale, live)
    meta = {"task": "svm", "lambda": lam, "epochs": epochs, "seed": seed,
            "scaling": scaling, "objective_history": hist}
    return LinearModel(f, b, meta)


def train_svr(X, y, lam: float = 1e-3, eps_tube: float = 0.01, epochs: int = 200, seed: int = 0,
              scaling: str = "global") -> LinearModel:
    """Linear epsilon-insensitive regression. Targets are centred internally;
    ``scaling`` is as for :func:`train_svm`."""
    X, y = _prepare(X, y)
    Z, mu, scale, live = _scale(X, scaling)
    ybar = float(np.mean(y))
    spread = float(np.max(np.abs(y - ybar)))
    spread = spread if spread > 0 else 1.0
    yc = (y - ybar) / spread
    lam_s, eps_s = lam * spread, eps_tube / spread

    def dloss(score, target):
        r = score - target
        if r > eps_s:
            return 1.0
        if r < -eps_s:
            return -1.0
        return 0.0

    f, b, hist = _sgd(Z, yc, lam_s, epochs, seed, dloss,
                      lambda f, b: tube_objective(f, b, Z, yc, lam_s, eps_s))
    hist = [h * spread for h in hist]
    f, b = _finish(f * spread, b * spread + ybar, mu, scale, live)
    meta = {"task": "svr", "lambda": lam, "epochs": epochs, "seed": seed, "eps_tube": eps_tube,
            "scaling": scaling, "objective_history": hist}
    return LinearModel(f, b, meta)


def model_to_F(model: LinearModel, v, attribution, sources=None, absolute: bool = False) -> LearnedF:
    """Split the decision value ``f.v + b`` over diagram points.

    Point j receives the coefficient-weighted values of the cells attributed
    to it plus a share of the bias proportional to its cell count. With
    ``absolute`` the coefficients enter by magnitude and the bias is dropped.
    ``sources`` maps attribution ids to diagram point indices.
    """
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    attribution = np.asarray(attribution).reshape(-1)
    if not (len(v) == len(model.f) == len(attribution)):
        raise DimensionMismatch(
            f"values {len(v)}, coefficients {len(model.f)}, attribution {len(attribution)}"
        )
    coef = np.abs(model.f) if absolute else model.f
    contrib = v * coef
    owned = attribution >= 0
    n_owned = int(owned.sum())
    weights = {}
    for j in np.unique(attribution[owned]):
        mask = attribution == j
        val = float(contrib[mask].sum())
        if not absolute:
            val += model.b * int(mask.sum()) / n_owned
        key = int(j) if sources is None else int(sources[j])
        weights[key] = weights.get(key, 0.0) + val
    return LearnedF(weights)


@dataclass(frozen=True)
class ModelF(WeightFunction):
    """F learned by a linear model over a structured featurizer; evaluated
    afresh on every diagram."""

    model: LinearModel
    featurizer: object
    absolute: bool = False

    def bind(self, diagram) -> LearnedF:
        sv = self.featurizer(diagram)
        return model_to_F(self.model, sv.flat(), sv.flat_attribution(), sv.sources, self.absolute)

    def point_weights(self, diagram, indices):
        return self.bind(diagram).point_weights(diagram, indices)

    def __hash__(self):
        return id(self)
