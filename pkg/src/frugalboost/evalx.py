"""Model selection on validation data and lambda sweeps for cost/accuracy curves."""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np

from .boosting import TrainConfig, TrainTrace, metric_value, train
from .cost import model_cost
from .dataset import CostSchedule, Dataset, format_number
from .errors import ConfigError, DataError
from .inference import predict
from .metrics import METRICS, accuracy, ndcg_at_k

__all__ = [
    "MetricPoint",
    "SweepConfig",
    "ndcg_at_k",
    "accuracy",
    "select_best_iteration",
    "evaluate_point",
    "sweep",
    "feature_subset_mask",
    "write_sweep_csv",
    "SWEEP_HEADER",
]

SWEEP_HEADER = ["lambda", "best_iteration", "validation_metric", "test_metric",
                "model_cost", "mean_example_cost"]


@dataclass(frozen=True)
class MetricPoint:
    lam: float
    best_iteration: int
    validation_metric: float
    test_metric: float
    model_cost: float
    mean_example_cost: float

    def row(self) -> list[str]:
        return [format_number(self.lam), str(self.best_iteration),
                repr(float(self.validation_metric)), repr(float(self.test_metric)),
                format_number(self.model_cost), format_number(self.mean_example_cost)]


@dataclass(frozen=True)
class SweepConfig:
    lambda_grid: tuple
    base: TrainConfig
    metric: str = "ndcg5"

    def __post_init__(self):
        grid = tuple(float(v) for v in self.lambda_grid)
        if not grid:
            raise ConfigError("lambda grid is empty")
        if any(v < 0 for v in grid) or list(grid) != sorted(grid):
            raise ConfigError("lambda grid must be non-negative and sorted ascending")
        if self.metric not in METRICS:
            raise ConfigError(f"unknown metric {self.metric!r}; expected one of {METRICS}")
        object.__setattr__(self, "lambda_grid", grid)


def select_best_iteration(trace) -> int:
    """Earliest 1-based iteration attaining the best validation metric.

    Accepts a :class:`TrainTrace` or a plain sequence of per-iteration metrics.
    """
    metrics = trace.validation_metric if isinstance(trace, TrainTrace) else trace
    if not metrics:
        raise DataError("no validation metrics recorded")
    return int(np.argmax(np.asarray(metrics, dtype=np.float64))) + 1


def evaluate_point(ens, trace, test: Dataset, schedule: CostSchedule, metric: str) -> MetricPoint:
    best = select_best_iteration(trace)
    model = ens.truncate(best)
    run = predict(model, test, schedule)
    return MetricPoint(
        lam=float(ens.meta.get("lambda", 0.0)),
        best_iteration=best,
        validation_metric=float(trace.validation_metric[best - 1]),
        test_metric=metric_value(metric, run.scores, test, model.loss),
        model_cost=model_cost(model.usage(), schedule),
        mean_example_cost=run.mean_cost,
    )


def sweep(train_ds: Dataset, validation: Dataset, test: Dataset, schedule: CostSchedule,
          cfg: SweepConfig) -> list[MetricPoint]:
    """Train once per lambda, pick the best validation iteration, score on test."""
    points = []
    for lam in cfg.lambda_grid:
        run_cfg = replace(cfg.base, lam=lam, metric=cfg.metric)
        ens, trace = train(train_ds, schedule, run_cfg, validation)
        points.append(evaluate_point(ens, trace, test, schedule, cfg.metric))
    return points


def feature_subset_mask(schedule: CostSchedule, max_cost: float) -> frozenset:
    """Features no more expensive than ``max_cost`` (the cost-group subset baseline)."""
    return frozenset(np.flatnonzero(schedule.costs <= max_cost).tolist())


def write_sweep_csv(points, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_HEADER)
        for p in points:
            w.writerow(p.row())
