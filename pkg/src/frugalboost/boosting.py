"""Stage-wise regression with cost-penalized trees.

Every iteration fits a tree to the negative loss gradient, scoring splits with
``lambda / eta`` times the cost of each feature not yet extracted, adds the
tree with step ``eta``, then marks the tree's features as paid for.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .cart import TreeBuilder, feature_penalties
from .cost import ExtractionState, FeatureUsage, total_cost
from .dataset import CostSchedule, Dataset
from .errors import ConfigError, DataError
from .metrics import METRICS, accuracy, ndcg_by_query

__all__ = [
    "LOSSES",
    "TrainConfig",
    "Ensemble",
    "TrainTrace",
    "residuals_squared",
    "residuals_multiclass",
    "softmax",
    "loss_value",
    "train",
    "plain_stagewise",
    "default_metric",
    "metric_value",
]

LOSSES = ("squared", "multiclass-logistic")


@dataclass(frozen=True)
class TrainConfig:
    eta: float = 0.1
    lam: float = 0.0
    iterations: int = 3000
    depth: int = 4
    min_leaf: int = 1
    loss: str = "squared"
    num_classes: int | None = None
    feature_mask: frozenset | None = None
    seed: int = 0
    metric: str | None = None
    max_iterations: int = 5000
    n_threads: int | None = None

    def __post_init__(self):
        if not self.eta > 0:
            raise ConfigError(f"eta must be positive, got {self.eta}")
        if not self.lam >= 0:
            raise ConfigError(f"lambda must be non-negative, got {self.lam}")
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise ConfigError(f"iterations must be a positive integer, got {self.iterations}")
        if self.iterations > self.max_iterations:
            raise ConfigError(f"iterations {self.iterations} exceeds the cap {self.max_iterations}")
        if self.depth < 1 or self.min_leaf < 1:
            raise ConfigError("depth and min_leaf must be positive")
        if self.loss not in LOSSES:
            raise ConfigError(f"unknown loss {self.loss!r}; expected one of {LOSSES}")
        if self.metric is not None and self.metric not in METRICS:
            raise ConfigError(f"unknown metric {self.metric!r}; expected one of {METRICS}")
        if self.feature_mask is not None:
            mask = frozenset(int(f) for f in self.feature_mask)
            if not mask:
                raise ConfigError("feature_mask must not be empty")
            object.__setattr__(self, "feature_mask", mask)

    @property
    def lambda_prime(self) -> float:
        return self.lam / self.eta


@dataclass
class Ensemble:
    """Trees grouped by iteration; one tree per class for multiclass models.

    Scores are ``eta * sum_t h_t(x)``, accumulated tree by tree from zero.
    """

    iterations: list
    eta: float
    loss: str = "squared"
    num_classes: int = 1
    d: int = 0
    schedule: CostSchedule | None = None
    meta: dict = field(default_factory=dict)

    @property
    def n_iterations(self) -> int:
        return len(self.iterations)

    @property
    def trees(self) -> list:
        """All trees in evaluation order."""
        return [t for it in self.iterations for t in it]

    @property
    def trees_per_iteration(self) -> int:
        return self.num_classes if self.loss == "multiclass-logistic" else 1

    def truncate(self, n_iterations: int) -> "Ensemble":
        if not 0 <= n_iterations <= self.n_iterations:
            raise ValueError(f"cannot truncate {self.n_iterations} iterations to {n_iterations}")
        return replace(self, iterations=list(self.iterations[:n_iterations]), meta=dict(self.meta))

    def usage(self) -> FeatureUsage:
        return FeatureUsage(tuple(t.features() for t in self.trees), self.d)

    def _check_X(self, X):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.d:
            raise DataError(f"expected {self.d} features, got shape {X.shape}")
        return X

    def decision_function(self, X) -> np.ndarray:
        X = self._check_X(X)
        K = self.trees_per_iteration
        H = np.zeros((X.shape[0], K))
        for it in self.iterations:
            for k, tree in enumerate(it):
                H[:, k] += self.eta * tree.predict(X)
        return H[:, 0] if self.loss == "squared" else H

    def staged_decision_function(self, X):
        """Yield scores after each iteration."""
        X = self._check_X(X)
        K = self.trees_per_iteration
        H = np.zeros((X.shape[0], K))
        for it in self.iterations:
            for k, tree in enumerate(it):
                H[:, k] += self.eta * tree.predict(X)
            yield H[:, 0].copy() if self.loss == "squared" else H.copy()


@dataclass
class TrainTrace:
    train_loss: list = field(default_factory=list)
    cumulative_cost: list = field(default_factory=list)
    new_features: list = field(default_factory=list)
    validation_metric: list | None = None
    metric: str | None = None
    phi: np.ndarray | None = None

    def first_extraction(self) -> dict:
        """Feature index -> 1-based iteration of first extraction."""
        out = {}
        for t, feats in enumerate(self.new_features, start=1):
            for a in feats:
                out.setdefault(a, t)
        return out


def residuals_squared(H, y) -> np.ndarray:
    H = np.asarray(H, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if H.shape != y.shape:
        raise DataError(f"prediction shape {H.shape} does not match labels {y.shape}")
    return y - H


def softmax(H) -> np.ndarray:
    H = np.asarray(H, dtype=np.float64)
    Z = np.exp(H - H.max(axis=1, keepdims=True))
    return Z / Z.sum(axis=1, keepdims=True)


def _class_ids(y, K):
    y = np.asarray(y)
    if not np.all(y == np.round(y)):
        raise DataError("class labels must be integers")
    y = y.astype(np.int64)
    if y.size and (y.min() < 0 or y.max() >= K):
        raise DataError(f"class label outside 0..{K - 1}")
    return y


def residuals_multiclass(H, y) -> np.ndarray:
    """Negative gradient of the softmax log-loss: one-hot labels minus probabilities."""
    H = np.asarray(H, dtype=np.float64)
    if H.ndim != 2 or H.shape[0] != len(y):
        raise DataError(f"scores of shape {H.shape} do not match {len(y)} labels")
    y = _class_ids(y, H.shape[1])
    R = -softmax(H)
    R[np.arange(len(y)), y] += 1.0
    return R


def loss_value(scores, labels, kind: str = "squared") -> float:
    """Mean squared loss ``(1/2n) sum (H - y)^2`` or mean multiclass log-loss."""
    H = np.asarray(scores, dtype=np.float64)
    if kind == "squared":
        y = np.asarray(labels, dtype=np.float64)
        if H.shape != y.shape:
            raise DataError(f"prediction shape {H.shape} does not match labels {y.shape}")
        return float(np.sum((H - y) ** 2) / (2 * y.size))
    if kind == "multiclass-logistic":
        if H.ndim != 2 or H.shape[0] != len(labels):
            raise DataError(f"scores of shape {H.shape} do not match {len(labels)} labels")
        y = _class_ids(labels, H.shape[1])
        m = H.max(axis=1)
        lse = m + np.log(np.exp(H - m[:, None]).sum(axis=1))
        return float(np.mean(lse - H[np.arange(len(y)), y]))
    raise ConfigError(f"unknown loss {kind!r}")


def default_metric(loss: str, ds: Dataset | None) -> str:
    if loss == "multiclass-logistic":
        return "accuracy"
    if ds is not None and ds.query_ids is not None:
        return "ndcg5"
    return "neg-loss"


def metric_value(metric: str, scores, ds: Dataset, loss: str, groups=None) -> float:
    """Evaluate ``metric`` (higher is better) for ``scores`` on ``ds``."""
    if metric == "ndcg5":
        if loss != "squared":
            raise DataError("ndcg5 needs a regression-scored model")
        if groups is None:
            groups = ds.query_groups()
        return ndcg_by_query(scores, ds.labels, groups, 5)
    if metric == "accuracy":
        if loss != "multiclass-logistic":
            raise DataError("accuracy needs a multiclass model")
        return accuracy(scores, _class_ids(ds.labels, np.shape(scores)[1]))
    if metric == "neg-loss":
        return -loss_value(scores, ds.labels, loss)
    raise ConfigError(f"unknown metric {metric!r}")


def _fit(train_ds: Dataset, schedule: CostSchedule, cfg: TrainConfig,
         validation: Dataset | None, penalize: bool):
    if train_ds.n == 0:
        raise DataError("empty training set")
    schedule.check(train_ds.d)
    d = train_ds.d
    if cfg.feature_mask is not None and max(cfg.feature_mask) >= d:
        raise ConfigError(f"feature_mask index {max(cfg.feature_mask)} out of range for d={d}")
    multiclass = cfg.loss == "multiclass-logistic"
    if multiclass:
        y = train_ds.class_labels(cfg.num_classes)
        K = int(cfg.num_classes) if cfg.num_classes is not None else int(y.max()) + 1
        if K < 2:
            raise DataError("multiclass training needs at least two classes")
    else:
        y = train_ds.labels
        K = 1

    metric = None
    if validation is not None:
        if validation.d != d:
            raise DataError(f"validation set has {validation.d} features, training set {d}")
        metric = cfg.metric or default_metric(cfg.loss, validation)
        val_groups = validation.query_groups() if metric == "ndcg5" else None
        Hv = np.zeros((validation.n, K))

    builder = TreeBuilder(train_ds.features, cfg.n_threads)
    state = ExtractionState(d)
    lambda_prime = cfg.lambda_prime if penalize else 0.0
    pen_schedule = schedule if penalize else None
    H = np.zeros((train_ds.n, K))
    ens = Ensemble([], cfg.eta, cfg.loss, K, d, schedule,
                   {"lambda": cfg.lam, "iterations": cfg.iterations, "seed": cfg.seed,
                    "depth": cfg.depth, "min_leaf": cfg.min_leaf})
    trace = TrainTrace(validation_metric=[] if validation is not None else None, metric=metric)
    used: set = set()

    for _ in range(cfg.iterations):
        R = residuals_multiclass(H, y) if multiclass else residuals_squared(H[:, 0], y)[:, None]
        pen = feature_penalties(pen_schedule, state.snapshot(), lambda_prime, d, cfg.feature_mask)
        trees = tuple(builder.build(R[:, k], pen, cfg.depth, cfg.min_leaf) for k in range(K))
        for k, tree in enumerate(trees):
            H[:, k] += cfg.eta * tree.predict(train_ds.features)
        ens.iterations.append(trees)
        feats = frozenset().union(*(t.features() for t in trees))
        trace.new_features.append(state.extract(feats))
        used |= feats
        trace.cumulative_cost.append(total_cost(used, len(ens.iterations) * K, schedule))
        scores = H if multiclass else H[:, 0]
        trace.train_loss.append(loss_value(scores, y, cfg.loss))
        if validation is not None:
            for k, tree in enumerate(trees):
                Hv[:, k] += cfg.eta * tree.predict(validation.features)
            vs = Hv if multiclass else Hv[:, 0]
            trace.validation_metric.append(metric_value(metric, vs, validation, cfg.loss, val_groups))
    trace.phi = state.snapshot()
    return ens, trace


def train(train_ds: Dataset, schedule: CostSchedule, cfg: TrainConfig,
          validation: Dataset | None = None):
    """Run the cost-aware boosting loop; returns ``(Ensemble, TrainTrace)``."""
    return _fit(train_ds, schedule, cfg, validation, penalize=True)


def plain_stagewise(train_ds: Dataset, schedule: CostSchedule, cfg: TrainConfig,
                    validation: Dataset | None = None):
    """Ordinary stage-wise regression: same loop with the cost penalty switched off.

    ``schedule`` is only used for cost reporting in the trace.
    """
    return _fit(train_ds, schedule, cfg, validation, penalize=False)
