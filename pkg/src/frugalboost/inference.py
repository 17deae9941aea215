"""Batch prediction with per-example test-time cost metering and early exits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boosting import Ensemble, softmax
from .cost import total_cost
from .dataset import CostSchedule, Dataset, format_number
from .errors import ConfigError, DataError

__all__ = [
    "PredictionRun",
    "EarlyExitPolicy",
    "CostGroupUsage",
    "predict",
    "predict_early_exit",
    "prefix_costs",
    "feature_usage_report",
]

EXIT_MODES = ("ranking", "confidence")


@dataclass
class PredictionRun:
    """Scores plus what each example cost to score.

    ``exited_at`` holds the iteration count at which an example left early,
    or -1 when it was evaluated to completion.
    """

    scores: np.ndarray
    per_example_cost: np.ndarray
    exited_at: np.ndarray
    trees_evaluated: np.ndarray

    @property
    def mean_cost(self) -> float:
        """Mean per-example cost; exact when every example paid the same."""
        vals, counts = np.unique(self.per_example_cost, return_counts=True)
        n = self.per_example_cost.shape[0]
        return math.fsum(v * (c / n) for v, c in zip(vals.tolist(), counts.tolist())) if n else 0.0

    @property
    def n_exited(self) -> int:
        return int(np.sum(self.exited_at >= 0))

    def lines(self):
        S = self.scores if self.scores.ndim == 2 else self.scores[:, None]
        for i in range(S.shape[0]):
            score = ",".join(repr(float(v)) for v in S[i])
            ex = "-" if self.exited_at[i] < 0 else str(int(self.exited_at[i]))
            yield f"{score} {format_number(self.per_example_cost[i])} {int(self.trees_evaluated[i])} {ex}"

    def write(self, path) -> None:
        with open(path, "w") as fh:
            for line in self.lines():
                fh.write(line + "\n")


@dataclass(frozen=True)
class EarlyExitPolicy:
    """Where and how aggressively to stop evaluating examples.

    ``ranking`` drops documents scoring far enough below the fifth-best
    surviving document of their query; ``confidence`` drops examples whose
    top class probability exceeds ``s``. Exits sit every ``exit_interval``
    iterations; ``total_trees`` (default: ensemble length) sets the margin schedule.
    """

    mode: str
    s: float
    exit_interval: int = 10
    total_trees: int | None = None

    def __post_init__(self):
        if self.mode not in EXIT_MODES:
            raise ConfigError(f"unknown early-exit mode {self.mode!r}; expected one of {EXIT_MODES}")
        if not self.s >= 0:
            raise ConfigError(f"s must be non-negative, got {self.s}")
        if self.exit_interval < 1:
            raise ConfigError("exit_interval must be positive")
        if self.total_trees is not None:
            if self.total_trees < 1:
                raise ConfigError("total_trees must be positive")
            if self.exit_interval > self.total_trees:
                raise ConfigError("exit_interval exceeds total_trees")

    def margin(self, exit_index: int, total: int) -> float:
        """Score gap below the fifth-best document that triggers an exit."""
        remaining = total - exit_index * self.exit_interval
        return max(remaining, 0) * self.s / max(total - 1, 1)


def prefix_costs(ens: Ensemble, schedule: CostSchedule) -> np.ndarray:
    """``out[j]``: cost of evaluating the first ``j`` iterations for one example."""
    schedule.check(ens.d)
    K = ens.trees_per_iteration
    out = np.zeros(ens.n_iterations + 1)
    used: set = set()
    for j, it in enumerate(ens.iterations, start=1):
        for t in it:
            used |= t.features()
        out[j] = total_cost(used, j * K, schedule)
    return out


def _schedule(ens, schedule):
    schedule = schedule if schedule is not None else ens.schedule
    if schedule is None:
        raise DataError("no cost schedule available for cost metering")
    return schedule


def _check_data(ens, ds):
    if ds.d != ens.d:
        raise DataError(f"model expects {ens.d} features, data has {ds.d}")


def predict(ens: Ensemble, ds: Dataset, schedule: CostSchedule | None = None) -> PredictionRun:
    """Evaluate every tree on every example.

    Each example pays for every tree and, once, for every feature of those trees.
    """
    _check_data(ens, ds)
    schedule = _schedule(ens, schedule)
    costs = prefix_costs(ens, schedule)
    T = ens.n_iterations
    return PredictionRun(
        scores=ens.decision_function(ds.features),
        per_example_cost=np.full(ds.n, costs[T]),
        exited_at=np.full(ds.n, -1, dtype=np.int64),
        trees_evaluated=np.full(ds.n, T * ens.trees_per_iteration, dtype=np.int64),
    )


def _ranking_drop(H, alive, groups, margin):
    drop = np.zeros_like(alive)
    for g in groups:
        g = g[alive[g]]
        if g.size <= 5:
            continue
        order = g[np.lexsort((g, -H[g]))]
        fifth = H[order[4]]
        rest = order[5:]
        drop[rest[H[rest] <= fifth - margin]] = True
    return drop


def predict_early_exit(ens: Ensemble, ds: Dataset, policy: EarlyExitPolicy,
                       schedule: CostSchedule | None = None) -> PredictionRun:
    """Evaluate iteration by iteration, retiring examples at each exit point.

    Retired examples keep their partial score and stop accruing cost. Exits
    are placed only where later iterations remain to be skipped.
    """
    _check_data(ens, ds)
    schedule = _schedule(ens, schedule)
    if policy.mode == "ranking":
        if ens.loss != "squared":
            raise DataError("ranking early exit needs a regression-scored model")
        groups = ds.query_groups()
    elif ens.loss != "multiclass-logistic":
        raise DataError("confidence early exit needs a multiclass model")
    costs = prefix_costs(ens, schedule)
    T = ens.n_iterations
    K = ens.trees_per_iteration
    total = policy.total_trees if policy.total_trees is not None else T
    X = ds.features
    H = np.zeros((ds.n, K))
    alive = np.ones(ds.n, dtype=bool)
    done = np.full(ds.n, T, dtype=np.int64)
    exited_at = np.full(ds.n, -1, dtype=np.int64)
    for j, it in enumerate(ens.iterations, start=1):
        rows = np.flatnonzero(alive)
        if rows.size == 0:
            break
        Xa = X[rows]
        for k, tree in enumerate(it):
            H[rows, k] += ens.eta * tree.predict(Xa)
        if j % policy.exit_interval or j >= T:
            continue
        if policy.mode == "ranking":
            drop = _ranking_drop(H[:, 0], alive, groups, policy.margin(j // policy.exit_interval, total))
        else:
            drop = np.zeros(ds.n, dtype=bool)
            drop[rows] = softmax(H[rows]).max(axis=1) > policy.s
        alive &= ~drop
        done[drop] = j
        exited_at[drop] = j
    return PredictionRun(
        scores=H[:, 0].copy() if ens.loss == "squared" else H,
        per_example_cost=costs[done],
        exited_at=exited_at,
        trees_evaluated=done * K,
    )


@dataclass(frozen=True)
class CostGroupUsage:
    cost: float
    n_features: int
    n_extracted: int
    first_iteration: dict

    @property
    def fraction(self) -> float:
        return self.n_extracted / self.n_features if self.n_features else 0.0


def feature_usage_report(ens: Ensemble, schedule: CostSchedule | None = None) -> list[CostGroupUsage]:
    """Fraction of each equal-cost feature group that the ensemble extracts.

    ``first_iteration`` maps each extracted feature of the group to the
    1-based iteration that first used it. Groups are sorted by cost.
    """
    schedule = _schedule(ens, schedule)
    schedule.check(ens.d)
    first: dict = {}
    for j, it in enumerate(ens.iterations, start=1):
        for t in it:
            for a in sorted(t.features()):
                first.setdefault(a, j)
    report = []
    for c in np.unique(schedule.costs):
        members = np.flatnonzero(schedule.costs == c)
        hits = {int(a): first[int(a)] for a in members if int(a) in first}
        report.append(CostGroupUsage(float(c), int(members.size), len(hits), hits))
    return report
