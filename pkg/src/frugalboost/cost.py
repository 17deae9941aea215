"""Test-time cost model and its capped-l1 relaxation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import CostSchedule
from .errors import DataError

__all__ = [
    "FeatureUsage",
    "ExtractionState",
    "model_cost",
    "feature_cost",
    "total_cost",
    "q_relax",
    "relaxed_feature_cost",
]


@dataclass(frozen=True)
class FeatureUsage:
    """Which features each tree splits on (the columns of the binary usage matrix)."""

    used_per_tree: tuple
    d: int

    def __post_init__(self):
        sets = tuple(frozenset(int(a) for a in s) for s in self.used_per_tree)
        for s in sets:
            if any(a < 0 or a >= self.d for a in s):
                raise DataError(f"feature index out of range for d={self.d}: {sorted(s)}")
        object.__setattr__(self, "used_per_tree", sets)

    @property
    def n_trees(self) -> int:
        return len(self.used_per_tree)

    def used(self) -> frozenset:
        return frozenset().union(*self.used_per_tree)

    def matrix(self) -> np.ndarray:
        F = np.zeros((self.d, self.n_trees), dtype=np.int8)
        for t, s in enumerate(self.used_per_tree):
            F[list(s), t] = 1
        return F


class ExtractionState:
    """Bit vector marking features not yet paid for (1) or already extracted (0).

    Bits only ever go from 1 to 0.
    """

    def __init__(self, d: int):
        self._phi = np.ones(d, dtype=np.int8)

    @property
    def phi(self) -> np.ndarray:
        v = self._phi.view()
        v.setflags(write=False)
        return v

    @property
    def d(self) -> int:
        return self._phi.shape[0]

    def snapshot(self) -> np.ndarray:
        return self._phi.copy()

    def extract(self, features) -> frozenset:
        """Clear the bits of ``features``; return the ones that were newly extracted."""
        idx = np.fromiter(sorted(set(int(a) for a in features)), dtype=np.intp)
        if idx.size == 0:
            return frozenset()
        new = idx[self._phi[idx] == 1]
        self._phi[idx] = 0
        return frozenset(new.tolist())

    def extracted(self) -> frozenset:
        return frozenset(np.flatnonzero(self._phi == 0).tolist())


def _check(usage: FeatureUsage, schedule: CostSchedule):
    if usage.d != schedule.d:
        raise DataError(f"feature usage has d={usage.d}, cost schedule has d={schedule.d}")


def _feature_sum(used, schedule):
    return float(sum(schedule.costs[a] for a in sorted(used)))


def total_cost(used, n_trees: int, schedule: CostSchedule) -> float:
    """``e * n_trees`` plus the cost of every feature in ``used``, each charged once."""
    return schedule.tree_eval_cost * n_trees + _feature_sum(used, schedule)


def feature_cost(usage: FeatureUsage, schedule: CostSchedule) -> float:
    """Sum of costs of features used by at least one tree, each counted once."""
    _check(usage, schedule)
    return _feature_sum(usage.used(), schedule)


def model_cost(usage: FeatureUsage, schedule: CostSchedule) -> float:
    """Tree evaluations plus one-time extraction of every used feature."""
    _check(usage, schedule)
    return total_cost(usage.used(), usage.n_trees, schedule)


def q_relax(x: float, eta: float) -> float:
    """``|x|/eta`` below ``eta``, capped at 1 from there on."""
    if not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    a = abs(x)
    return a / eta if a < eta else 1.0


def relaxed_feature_cost(usage: FeatureUsage, weights_per_tree, schedule: CostSchedule,
                         eta: float) -> float:
    """Feature-cost term with the l0 norm of each feature's total weight replaced by q."""
    _check(usage, schedule)
    w = [float(b) for b in weights_per_tree]
    if len(w) != usage.n_trees:
        raise DataError(f"{len(w)} weights for {usage.n_trees} trees")
    total = 0.0
    for a in range(usage.d):
        mass = sum(b for b, s in zip(w, usage.used_per_tree) if a in s)
        if mass:
            total += schedule.costs[a] * q_relax(mass, eta)
    return total
