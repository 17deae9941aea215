"""Synthetic data generators for tests, benchmarks and demos."""

from __future__ import annotations

import numpy as np

from .dataset import CostSchedule, Dataset

EXPENSIVE_COST = 100.0
CHEAP_COST = 1.0
TREE_EVAL_COST = 0.01


def cheap_vs_expensive(n: int = 2000, seed: int = 0, n_cheap: int = 10, n_distractors: int = 0,
                       detail: float = 0.05, label_noise: float = 0.5, slope: float = 2.5,
                       max_grade: int = 8, query_size: int = 20):
    """Ranking data where one expensive feature is worth roughly ten cheap ones.

    Cheap features are independent signs ``u_j`` in {-1, +1}; the expensive
    feature 0 is ``sum(u) / sqrt(n_cheap)`` plus a little extra detail, so the
    cheap features reproduce it only up to that detail. Relevance grades are
    ``round(max_grade / 2 + slope * x0 + noise)`` clipped to ``0..max_grade``.
    Optional distractors (also expensive) are heavily noised copies of feature 0
    and come last. Feature costs: 100 expensive, 1 cheap; a tree costs 0.01.
    """
    rng = np.random.default_rng(seed)
    u = rng.choice([-1.0, 1.0], size=(n, n_cheap))
    x0 = u.sum(axis=1) / np.sqrt(n_cheap) + detail * rng.normal(size=n)
    cols = [x0[:, None], u]
    if n_distractors:
        cols.append(x0[:, None] + 2.0 * rng.normal(size=(n, n_distractors)))
    X = np.hstack(cols)
    grades = np.round(max_grade / 2 + slope * x0 + label_noise * rng.normal(size=n))
    y = np.clip(grades, 0, max_grade)
    qid = np.arange(n) // query_size
    costs = [EXPENSIVE_COST] + [CHEAP_COST] * n_cheap + [EXPENSIVE_COST] * n_distractors
    return Dataset(X, y, qid), CostSchedule(costs, TREE_EVAL_COST)


def random_regression(n: int, d: int, seed: int = 0, noise: float = 0.3):
    """Nonlinear regression target over a few of ``d`` Gaussian features; random integer costs."""
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, d))
    y = X[:, 0] + 0.5 * X[:, 1 % d] ** 2 - np.sin(2 * X[:, 2 % d]) + noise * rng.normal(size=n)
    costs = rng.choice([1.0, 5.0, 10.0, 20.0, 50.0, 100.0, 150.0], size=d)
    return Dataset(X, y), CostSchedule(costs, 1.0)


def multiclass_blobs(n: int, num_classes: int, d: int, seed: int = 0, spread: float = 1.0):
    """Gaussian class clusters; every class is guaranteed to appear."""
    rng = np.random.default_rng(seed)
    centers = 2.0 * rng.normal(size=(num_classes, d))
    y = np.arange(n) % num_classes
    rng.shuffle(y)
    X = centers[y] + spread * rng.normal(size=(n, d))
    costs = rng.choice([1.0, 5.0, 20.0], size=d)
    return Dataset(X, y), CostSchedule(costs, 1.0)


def ranking_queries(n_queries: int, docs_per_query: int, d: int, seed: int = 0):
    """Small ranking set with integer relevance 0..4 driven by the first two features."""
    rng = np.random.default_rng(seed)
    n = n_queries * docs_per_query
    X = rng.normal(size=(n, d))
    rel = np.clip(np.round(1.5 + X[:, 0] + 0.5 * X[:, 1 % d] + 0.5 * rng.normal(size=n)), 0, 4)
    qid = np.repeat(np.arange(n_queries), docs_per_query)
    return Dataset(X, rel, qid), CostSchedule(rng.choice([1.0, 5.0, 20.0], size=d), 1.0)
