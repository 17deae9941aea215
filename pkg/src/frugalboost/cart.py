"""Depth-limited regression trees fitted to residuals under a feature-cost penalty.

Each candidate split is scored as half the squared deviation of the residuals
in its two children plus ``lambda_prime * c[f] * phi[f]`` when feature ``f``
has not yet been used anywhere in the tree under construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dataset import CostSchedule, Dataset
from .errors import DataError

__all__ = [
    "Tree",
    "SplitCandidate",
    "TreeBuilder",
    "build_tree",
    "predict_tree",
    "tree_features",
    "feature_penalties",
    "leaf_score",
    "split_score",
    "midpoint",
    "SPLIT_TOL",
]

# a split must beat the leaf by this fraction of 0.5 * sum(r**2)
SPLIT_TOL = 1e-12
# kernel scores within this relative band of the best are re-scored exactly
_BAND_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class Tree:
    """Binary regression tree in flat array form.

    ``feature[i] == -1`` marks a leaf. Node 0 is the root; nodes are stored in
    depth-first, left-first order. Routing sends ``x[feature] <= threshold`` left.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray

    def __post_init__(self):
        for name, dt in (("feature", np.int64), ("threshold", np.float64),
                         ("left", np.int64), ("right", np.int64), ("value", np.float64)):
            a = np.array(getattr(self, name), dtype=dt, copy=True)
            a.setflags(write=False)
            object.__setattr__(self, name, a)
        n = self.feature.shape[0]
        if n == 0 or any(getattr(self, k).shape != (n,) for k in ("threshold", "left", "right", "value")):
            raise DataError("malformed tree arrays")
        split = self.feature >= 0
        kids = np.concatenate([self.left[split], self.right[split]])
        if kids.size and (kids.min() < 1 or kids.max() >= n or np.unique(kids).size != kids.size):
            raise DataError("malformed tree: bad child references")
        if kids.size != n - 1:
            raise DataError("malformed tree: unreachable nodes")

    @classmethod
    def leaf(cls, value: float) -> "Tree":
        return cls([-1], [0.0], [-1], [-1], [value])

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    def depth(self) -> int:
        def rec(i):
            if self.feature[i] < 0:
                return 0
            return 1 + max(rec(self.left[i]), rec(self.right[i]))

        return rec(0)

    def features(self) -> frozenset:
        return frozenset(int(f) for f in self.feature[self.feature >= 0])

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by every row of ``X``."""
        X = np.asarray(X, dtype=np.float64)
        node = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        active = self.feature[node] >= 0
        while active.any():
            r = rows[active]
            nd = node[active]
            go_left = X[r, self.feature[nd]] <= self.threshold[nd]
            node[active] = np.where(go_left, self.left[nd], self.right[nd])
            active = self.feature[node] >= 0
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def equals(self, other: "Tree") -> bool:
        return all(np.array_equal(getattr(self, k), getattr(other, k))
                   for k in ("feature", "threshold", "left", "right", "value"))


@dataclass(frozen=True)
class SplitCandidate:
    feature: int
    threshold: float
    score: float
    new_feature_penalty: float


def predict_tree(tree: Tree, example) -> float:
    x = np.asarray(example, dtype=np.float64)
    i = 0
    while tree.feature[i] >= 0:
        i = tree.left[i] if x[tree.feature[i]] <= tree.threshold[i] else tree.right[i]
    return float(tree.value[i])


def tree_features(tree: Tree) -> frozenset:
    return tree.features()


def midpoint(a: float, b: float) -> float:
    """Threshold between two consecutive distinct values; ``a <= t < b``."""
    t = (a + b) / 2.0
    if not a <= t < b:
        t = a
    return t


def feature_penalties(schedule: CostSchedule | None, phi, lambda_prime: float, d: int,
                      feature_mask=None) -> np.ndarray:
    """Per-feature first-use penalty; ``inf`` marks features that may not be split on."""
    if lambda_prime < 0:
        raise ValueError(f"lambda_prime must be non-negative, got {lambda_prime}")
    pen = np.zeros(d)
    if schedule is not None and lambda_prime > 0:
        schedule.check(d)
        phi = np.ones(d) if phi is None else np.asarray(phi, dtype=np.float64)
        if phi.shape != (d,):
            raise DataError(f"phi has length {phi.shape[0]}, expected {d}")
        pen = lambda_prime * schedule.costs * phi
    if feature_mask is not None:
        allowed = np.zeros(d, dtype=bool)
        allowed[sorted(int(f) for f in feature_mask)] = True
        pen[~allowed] = np.inf
    return pen


def leaf_score(r: np.ndarray) -> float:
    """Half the squared deviation of ``r`` around its mean."""
    if r.size == 0:
        return 0.0
    dev = r - r.mean()
    return 0.5 * float(np.sum(dev * dev))


def split_score(r: np.ndarray, go_left: np.ndarray, penalty: float) -> float:
    return leaf_score(r[go_left]) + leaf_score(r[~go_left]) + penalty


class TreeBuilder:
    """Greedy depth-first CART over a fixed feature matrix.

    The per-feature sort order is computed once and reused for every tree.
    """

    def __init__(self, X: np.ndarray, n_threads: int | None = None, backend=None):
        X = np.ascontiguousarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] == 0:
            raise DataError("cannot build a tree on an empty dataset")
        self.X = X
        self.Xt = np.ascontiguousarray(X.T)
        self.n, self.d = X.shape
        self.order0 = np.ascontiguousarray(np.argsort(self.Xt, axis=1, kind="stable").astype(np.intp))
        self.n_threads = _kernels.default_threads() if n_threads is None else max(1, int(n_threads))
        self.kernel = _kernels.backend if backend is None else backend
        self._buf = np.empty(self.d * max(self.n - 1, 1))

    def build(self, residuals, penalties, depth: int = 4, min_leaf: int = 1) -> Tree:
        r = np.ascontiguousarray(residuals, dtype=np.float64)
        if r.shape != (self.n,):
            raise DataError(f"residuals have length {r.shape[0]}, expected {self.n}")
        if depth < 1 or min_leaf < 1:
            raise ValueError("depth and min_leaf must be positive")
        pen = np.ascontiguousarray(penalties, dtype=np.float64)
        if pen.shape != (self.d,):
            raise DataError(f"penalties have length {pen.shape[0]}, expected {self.d}")
        self._r = r
        self._pen = pen.copy()
        self._order = self.order0.copy()
        self._min_leaf = int(min_leaf)
        self._nodes = []
        self._grow(0, self.n, depth)
        f, t, le, ri, v = zip(*self._nodes)
        return Tree(f, t, le, ri, v)

    def _grow(self, start, end, depth_left):
        nid = len(self._nodes)
        idx = np.sort(self._order[0, start:end])
        rn = self._r[idx]
        mean = rn.mean()
        self._nodes.append([-1, 0.0, -1, -1, float(mean)])
        best = None
        if depth_left > 0 and end - start >= 2 * self._min_leaf:
            best = self._best_split(idx, rn, start, end, mean)
        if best is None:
            return nid
        go_left = np.zeros(self.n, dtype=np.uint8)
        go_left[idx] = self.X[idx, best.feature] <= best.threshold
        n_left = int(go_left[idx].sum())
        self.kernel.partition(self._order, start, end, go_left, self.n_threads)
        self._pen[best.feature] = 0.0
        node = self._nodes[nid]
        node[0], node[1] = best.feature, best.threshold
        node[2] = self._grow(start, start + n_left, depth_left - 1)
        node[3] = self._grow(start + n_left, end, depth_left - 1)
        return nid

    def _best_split(self, idx, rn, start, end, mean):
        dev = rn - mean
        q_total = float(np.sum(dev * dev))
        s_total = float(np.sum(dev))
        unsplit = 0.5 * q_total
        guard = SPLIT_TOL * 0.5 * float(np.sum(rn * rn))
        if unsplit <= guard:
            return None
        m = end - start
        out = self._buf[: self.d * (m - 1)].reshape(self.d, m - 1)
        self.kernel.split_scores(self.Xt, self._r, self._order, start, end, float(mean),
                                 q_total, s_total, self._pen, self._min_leaf, out,
                                 self.n_threads)
        approx = float(out.min())
        band = _BAND_TOL * (unsplit + abs(approx))
        if not np.isfinite(approx) or approx >= unsplit - guard + band:
            return None
        # exact re-scoring in example order settles near-ties deterministically
        chosen = None
        for f, k in zip(*np.nonzero(out <= approx + band)):
            seg = self._order[f, start:end]
            thr = midpoint(self.Xt[f, seg[k]], self.Xt[f, seg[k + 1]])
            score = split_score(rn, self.X[idx, f] <= thr, self._pen[f])
            key = (score, int(f), thr)
            if chosen is None or key < chosen:
                chosen = key
        score, f, thr = chosen
        if not score < unsplit - guard:
            return None
        return SplitCandidate(f, thr, score, float(self._pen[f]))


def build_tree(ds: Dataset, residuals, schedule: CostSchedule | None, phi, lambda_prime: float,
               depth: int = 4, min_leaf: int = 1, feature_mask=None,
               n_threads: int | None = None) -> Tree:
    """Fit one cost-penalized regression tree to ``residuals``.

    ``phi[a] == 1`` means feature ``a`` has not been paid for by earlier trees.
    Leaves hold the mean residual of the examples routed to them.
    """
    if ds.n == 0:
        raise DataError("cannot build a tree on an empty dataset")
    pen = feature_penalties(schedule, phi, lambda_prime, ds.d, feature_mask)
    return TreeBuilder(ds.features, n_threads).build(residuals, pen, depth, min_leaf)
